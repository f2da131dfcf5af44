use std::collections::{HashMap, HashSet};

use super::family::UpFamily;
use crate::error::{Error, Result};

/// A permutation group on `0..degree`, given by generators
/// (`g[i]` is the image of `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Vec<usize>>,
}

impl PermutationGroup {
    pub fn new(degree: usize, generators: Vec<Vec<usize>>) -> Result<Self> {
        for g in &generators {
            let mut seen = vec![false; degree];
            if g.len() != degree
                || g.iter()
                    .any(|&x| x >= degree || std::mem::replace(&mut seen[x], true))
            {
                return Err(Error::invalid(format!(
                    "{g:?} is not a permutation of {degree} points"
                )));
            }
        }
        Ok(PermutationGroup { degree, generators })
    }

    pub fn trivial(degree: usize) -> Self {
        PermutationGroup {
            degree,
            generators: Vec::new(),
        }
    }

    /// The full symmetric group, generated by a transposition and an n-cycle.
    pub fn symmetric(degree: usize) -> Self {
        let mut generators = Vec::new();
        if degree >= 2 {
            let mut swap: Vec<usize> = (0..degree).collect();
            swap.swap(0, 1);
            generators.push(swap);
        }
        if degree >= 3 {
            generators.push((0..degree).map(|i| (i + 1) % degree).collect());
        }
        PermutationGroup { degree, generators }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    /// Generators of the induced action on `families`. Fails if some
    /// generator maps a listed family outside the list.
    pub fn family_action(&self, families: &[UpFamily]) -> Result<Vec<Vec<u32>>> {
        let position: HashMap<&UpFamily, u32> = families
            .iter()
            .enumerate()
            .map(|(i, f)| (f, i as u32))
            .collect();
        let mut action = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            if families.iter().any(|f| f.ground_size() != self.degree) {
                return Err(Error::invalid("group degree differs from |P|"));
            }
            let mut image = Vec::with_capacity(families.len());
            for (i, f) in families.iter().enumerate() {
                match position.get(&f.permuted(g)) {
                    Some(&j) => image.push(j),
                    None => {
                        return Err(Error::invalid(format!(
                            "permutation {g:?} does not preserve the nerve (family {i})"
                        )))
                    }
                }
            }
            action.push(image);
        }
        Ok(action)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Smallest element of each orbit, ascending.
pub(crate) fn orbit_representatives(n: usize, generators: &[Vec<u32>]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    for g in generators {
        for (i, &j) in g.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j as usize));
            // Keep the smaller index as root so roots are orbit minima.
            if a < b {
                parent[b] = a;
            } else if b < a {
                parent[a] = b;
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).collect()
}

/// Schreier generators of the stabilizer of `point`.
pub(crate) fn stabilizer_generators(
    n: usize,
    generators: &[Vec<u32>],
    point: usize,
) -> Vec<Vec<u32>> {
    let identity: Vec<u32> = (0..n as u32).collect();
    // transversal[x] maps `point` to `x`.
    let mut transversal: Vec<Option<Vec<u32>>> = vec![None; n];
    transversal[point] = Some(identity.clone());
    let mut queue = vec![point];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        let ux = transversal[x]
            .clone()
            .expect("queued points have transversals");
        for g in generators {
            let y = g[x] as usize;
            if transversal[y].is_none() {
                transversal[y] = Some(ux.iter().map(|&i| g[i as usize]).collect());
                queue.push(y);
            }
        }
    }
    let mut out: HashSet<Vec<u32>> = HashSet::new();
    for &x in &queue {
        let ux = transversal[x].as_ref().expect("orbit point");
        for g in generators {
            let uy = transversal[g[x] as usize]
                .as_ref()
                .expect("orbit is closed");
            let mut uy_inv = vec![0u32; n];
            for (i, &v) in uy.iter().enumerate() {
                uy_inv[v as usize] = i as u32;
            }
            let s: Vec<u32> = ux.iter().map(|&i| uy_inv[g[i as usize] as usize]).collect();
            if s != identity {
                out.insert(s);
            }
        }
    }
    let mut out: Vec<Vec<u32>> = out.into_iter().collect();
    out.sort_unstable();
    out
}
