use anyhow::{bail, Result};
use clap::{Args, Subcommand};
use convexity::bounds::{
    self, below_turan_threshold, check_kk_bound, count_r_bad, find_k_disjoint_common, is_r_good,
    jamison_disjoint_subsets, kk_exhaustive_pairs, kk_random, local_to_global_independent,
    local_to_global_sweep, shadow, turan_graph_sweep, turan_independent,
};
use convexity::counterexample::{build_counterexample, counterexample_report, CexOptions};
use convexity::jamison::{build_jamison_system, jamison_tverberg, selection_statistic};
use convexity::nerve::{
    check_n5_abstract, check_n_properties, compute_nerve_on, nerve_to_space, PermutationGroup,
};
use convexity::radon::{
    centrepoints, check_recurrences, radon_number, tverberg_partition, weak_epsilon_net,
};
use convexity::space::{random_space, Violation};
use convexity::{ConvexitySpace, Error, ExampleKind, HullOracle, SubsetMask};
use serde::Serialize;

use crate::input::{
    load_nerve, load_oracle, load_space, load_space_document, load_space_source, parse_points,
    parse_set, read_source, EmbeddedNerveDocument, InputError, LoadedSpace, Oracle,
};
use crate::{Output, Verdict};

#[derive(Args, Debug)]
pub struct SpaceArg {
    /// Builtin specifier (interval:N, singleton:N, free:N, box:AxB), JSON file, or `-`.
    #[arg(long, default_value = "-")]
    space: String,
}

#[derive(Args, Debug)]
pub struct PointsArg {
    /// Point indices (`0,2,5`) or `all`.
    #[arg(long)]
    set: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum SpaceCmd {
    /// Emit a builtin or seeded random space as JSON.
    Gen {
        /// Builtin specifier.
        #[arg(long, conflicts_with = "random")]
        kind: Option<ExampleKind>,
        /// Ground size of a random space (uses --seed).
        #[arg(long)]
        random: Option<usize>,
        /// Number of random generators.
        #[arg(long, default_value_t = 4)]
        generators: usize,
    },
    /// Check closure under intersection and the presence of the empty and full sets.
    Validate {
        #[command(flatten)]
        space: SpaceArg,
    },
    /// Convex hull of a set.
    Hull {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        points: PointsArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum RadonCmd {
    /// Exact k-th Radon number.
    Number {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        k: usize,
    },
    /// First partition into k parts whose hulls share a point.
    Partition {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        points: PointsArg,
        #[arg(long)]
        k: usize,
    },
    /// Exact r_1..r_kmax with the known inequalities between them.
    Recurrences {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
    },
    /// Points in every convex set holding a heavy fraction of the set.
    Centrepoint {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        points: PointsArg,
        /// Radon number to use; computed when omitted.
        #[arg(long)]
        r2: Option<usize>,
    },
    /// Minimum weak epsilon-net.
    Epsnet {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        points: PointsArg,
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum NerveCmd {
    /// Nerve of a point set. Reading `nerve to-space` output checks the roundtrip.
    Compute {
        #[command(flatten)]
        space: SpaceArg,
        /// Ordered points of P (default: all).
        #[command(flatten)]
        points: PointsArg,
    },
    /// Structural properties of a nerve document.
    Check {
        #[arg(long = "in", default_value = "-")]
        input: String,
    },
    /// Space whose points are the nerve's families.
    ToSpace {
        #[arg(long = "in", default_value = "-")]
        input: String,
        /// Skip writing explicit convex sets.
        #[arg(long)]
        closed_form: bool,
    },
    /// Groupings of r families into t parts (with --symmetry, uses all permutations of P when they preserve the nerve).
    N5 {
        #[arg(long = "in", default_value = "-")]
        input: String,
        #[arg(long, default_value_t = 4)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        t: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum CexCmd {
    /// Emit the nerve document.
    Build {
        #[arg(long)]
        k: usize,
    },
    /// Run every verification and report.
    Verify {
        #[arg(long)]
        k: usize,
        /// Also scan the realized space for its Radon number.
        #[arg(long)]
        space_crosscheck: bool,
        /// Write the nerve document here.
        #[arg(long)]
        emit_nerve: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum JamisonCmd {
    /// Families F_p and the exchange properties.
    System {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        points: PointsArg,
    },
    /// Partition into k parts inside one family.
    Tverberg {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        points: PointsArg,
        #[arg(long)]
        k: usize,
    },
    /// Most pair hulls through a single point.
    Selection {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        points: PointsArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum BoundsCmd {
    /// Shadow of a tuple family (text file).
    Shadow {
        #[arg(long = "in", default_value = "-")]
        input: String,
    },
    /// Shadow size against its lower bound.
    Kk {
        /// Tuple family text file.
        #[arg(long = "in", conflicts_with_all = ["exhaustive_pairs", "random"])]
        input: Option<String>,
        /// Every family of pairs on grounds up to this size.
        #[arg(long)]
        exhaustive_pairs: Option<usize>,
        /// Number of seeded random families.
        #[arg(long, conflicts_with = "exhaustive_pairs")]
        random: Option<usize>,
        #[arg(long, default_value_t = 3)]
        max_d: usize,
        #[arg(long, default_value_t = 3)]
        max_r: usize,
        #[arg(long, default_value_t = 7)]
        max_ground: usize,
    },
    /// Tuples of a-subsets without r pairwise disjoint coordinates.
    Rgood {
        #[arg(long)]
        ground: usize,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        r: usize,
        /// Sample count when exact enumeration is too large.
        #[arg(long, default_value_t = 0)]
        samples: u64,
        /// Test one tuple instead, coordinates separated by `|`.
        #[arg(long)]
        tuple: Option<String>,
    },
    /// Independent set guaranteed by the edge-count threshold.
    Turan {
        /// Hypergraph text file.
        #[arg(long = "in", conflicts_with = "sweep", requires = "l")]
        input: Option<String>,
        #[arg(long)]
        l: Option<usize>,
        /// Check every graph on up to this many vertices.
        #[arg(long)]
        sweep: Option<usize>,
    },
    /// Independent sets from the local condition on s-subsets.
    Indep {
        /// Graph text file.
        #[arg(long = "in", conflicts_with = "random", requires_all = ["s", "t"])]
        input: Option<String>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        /// Number of seeded random graphs.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 12)]
        max_n: usize,
    },
    /// Disjoint subsets in one nerve family.
    Disjoint {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        points: PointsArg,
        /// Build 2^t sets from exactly r_2^t points.
        #[arg(long, conflicts_with = "k")]
        t: Option<u32>,
        /// Find k sets.
        #[arg(long)]
        k: Option<usize>,
    },
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::anyhow!(InputError(msg.into()))
}

pub fn space(cmd: SpaceCmd, out: &Output) -> Result<Verdict> {
    let limits = out.config.limits();
    match cmd {
        SpaceCmd::Gen {
            kind,
            random,
            generators,
        } => {
            let space = match (kind, random) {
                (Some(kind), None) => convexity::space::make_example_space(&kind)?,
                (None, Some(n)) => random_space(n, generators, out.config.seed)?,
                _ => bail!(usage("give exactly one of --kind or --random")),
            };
            out.document(&space.to_document())?;
        }
        SpaceCmd::Validate { space } => {
            #[derive(Serialize)]
            struct Validation {
                n: usize,
                convex_sets: usize,
                valid: bool,
                violation: Option<Violation>,
            }
            let candidate = match load_space_source(&space.space) {
                Ok(LoadedSpace::Explicit(s)) => s,
                Ok(LoadedSpace::Embedded { space: Some(s), .. }) => s,
                Ok(LoadedSpace::Embedded { nerve, .. }) => {
                    nerve_to_space(&nerve, &limits)?.materialize(&limits)?
                }
                // Rebuild without checks so the violation can be reported.
                Err(_) => {
                    let doc = load_space_document(&space.space)?;
                    let sets = doc
                        .convex_sets
                        .iter()
                        .enumerate()
                        .map(|(i, h)| {
                            SubsetMask::from_hex(h, doc.n).map_err(|e| {
                                usage(format!("{}: convex_sets[{i}]: {e}", space.space))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    ConvexitySpace::from_raw(doc.n, sets)
                }
            };
            let violation = candidate.validate();
            out.report(&Validation {
                n: candidate.n(),
                convex_sets: candidate.convex_sets().len(),
                valid: violation.is_none(),
                violation: violation.clone(),
            })?;
            return Ok(Verdict::from_holds(violation.is_none()));
        }
        SpaceCmd::Hull { space, points } => {
            #[derive(Serialize)]
            struct HullReport {
                set: SubsetMask,
                hull: SubsetMask,
            }
            let oracle = load_oracle(&space.space, &limits)?;
            let set = parse_set(points.set.as_deref(), oracle.ground_size())?;
            out.report(&HullReport {
                set,
                hull: oracle.hull(&set),
            })?;
        }
    }
    Ok(Verdict::Ok)
}

/// The attained second Radon number, or a domain error.
fn attained_r2(oracle: &impl HullOracle, limits: &convexity::Limits) -> Result<usize> {
    radon_number(oracle, 2, limits)?
        .value
        .attained()
        .ok_or_else(|| Error::Domain("r_2 is not attained on this space".into()).into())
}

pub fn radon(cmd: RadonCmd, out: &Output) -> Result<Verdict> {
    let limits = out.config.limits();
    match cmd {
        RadonCmd::Number { space, k } => {
            let oracle = load_oracle(&space.space, &limits)?;
            out.report(&radon_number(&oracle, k, &limits)?)?;
        }
        RadonCmd::Partition { space, points, k } => {
            #[derive(Serialize)]
            struct PartitionReport {
                set: SubsetMask,
                k: usize,
                found: bool,
                parts: Option<Vec<SubsetMask>>,
                common_point: Option<usize>,
            }
            let oracle = load_oracle(&space.space, &limits)?;
            let set = parse_set(points.set.as_deref(), oracle.ground_size())?;
            if k == 0 {
                bail!(usage("k must be at least 1"));
            }
            let part = tverberg_partition(&oracle, &set, k);
            out.report(&PartitionReport {
                set,
                k,
                found: part.is_some(),
                common_point: part.as_ref().and_then(|p| oracle.common_point(&p.parts)),
                parts: part.map(|p| p.parts),
            })?;
        }
        RadonCmd::Recurrences { space, k_max } => {
            let oracle = load_oracle(&space.space, &limits)?;
            let report = check_recurrences(&oracle, k_max, &limits)?;
            out.report(&report)?;
            return Ok(Verdict::from_holds(!report.any_failure()));
        }
        RadonCmd::Centrepoint { space, points, r2 } => {
            #[derive(Serialize)]
            struct CentreReport {
                set: SubsetMask,
                r2: usize,
                centrepoints: SubsetMask,
                centrepoint: Option<usize>,
            }
            let space = load_space(&space.space, &limits)?;
            let set = parse_set(points.set.as_deref(), space.n())?;
            let r2 = match r2 {
                Some(r) => r,
                None => attained_r2(&space, &limits)?,
            };
            let all = centrepoints(&space, &set, r2)?;
            out.report(&CentreReport {
                set,
                r2,
                centrepoints: all,
                centrepoint: all.first(),
            })?;
            return Ok(Verdict::from_holds(!all.is_empty()));
        }
        RadonCmd::Epsnet { space, points, eps } => {
            #[derive(Serialize)]
            struct NetReport {
                set: SubsetMask,
                epsilon: f64,
                net: SubsetMask,
                size: usize,
            }
            let space = load_space(&space.space, &limits)?;
            let set = parse_set(points.set.as_deref(), space.n())?;
            let net = weak_epsilon_net(&space, &set, eps, &limits)?;
            out.report(&NetReport {
                set,
                epsilon: eps,
                size: net.len(),
                net,
            })?;
        }
    }
    Ok(Verdict::Ok)
}

pub fn nerve(cmd: NerveCmd, out: &Output) -> Result<Verdict> {
    let limits = out.config.limits();
    match cmd {
        NerveCmd::Compute { space, points } => match load_space_source(&space.space)? {
            LoadedSpace::Explicit(s) => {
                let pts = parse_points(points.set.as_deref(), s.n())?;
                out.document(&compute_nerve_on(&s, &pts, &limits)?.to_document())?;
            }
            LoadedSpace::Embedded { doc, nerve, space } => {
                let oracle = match space {
                    Some(s) => Oracle::Explicit(s),
                    None => Oracle::Nerve(nerve_to_space(&nerve, &limits)?),
                };
                let pts = match points.set.as_deref() {
                    None => doc.embedding.clone(),
                    Some(text) => parse_points(Some(text), oracle.ground_size())?,
                };
                let computed = compute_nerve_on(&oracle, &pts, &limits)?;
                out.document(&computed.to_document())?;
                if pts == doc.embedding && computed != nerve {
                    eprintln!("nerve of the embedded points differs from the source nerve");
                    return Ok(Verdict::Violated);
                }
            }
        },
        NerveCmd::Check { input } => {
            let nv = load_nerve(&input)?;
            let report = check_n_properties(&nv);
            out.report(&report)?;
            return Ok(Verdict::from_holds(report.holds()));
        }
        NerveCmd::ToSpace { input, closed_form } => {
            let nv = load_nerve(&input)?;
            let ns = nerve_to_space(&nv, &limits)?;
            let space = if closed_form {
                None
            } else {
                Some(ns.materialize(&limits)?.to_document())
            };
            out.document(&EmbeddedNerveDocument {
                nerve: nv.to_document(),
                points: ns.points().len(),
                embedding: ns.embedding().to_vec(),
                space,
            })?;
        }
        NerveCmd::N5 { input, r, t } => {
            let nv = load_nerve(&input)?;
            let group = if out.config.symmetry {
                let g = PermutationGroup::symmetric(nv.ground_size());
                g.family_action(nv.maximal_families()).is_ok().then_some(g)
            } else {
                None
            };
            let outcome = check_n5_abstract(&nv, r, t, group.as_ref(), &limits)?;
            out.report(&outcome)?;
            return Ok(Verdict::from_holds(outcome.holds));
        }
    }
    Ok(Verdict::Ok)
}

pub fn cex(cmd: CexCmd, out: &Output) -> Result<Verdict> {
    let limits = out.config.limits();
    match cmd {
        CexCmd::Build { k } => {
            out.document(&build_counterexample(k, &limits)?.nerve.to_document())?;
        }
        CexCmd::Verify {
            k,
            space_crosscheck,
            emit_nerve,
        } => {
            if let Some(path) = emit_nerve {
                let doc = build_counterexample(k, &limits)?.nerve.to_document();
                std::fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
            }
            let options = CexOptions {
                symmetry: out.config.symmetry,
                space_crosscheck,
                timings: out.config.timings,
            };
            let report = counterexample_report(k, options, &limits)?;
            out.report(&report)?;
            return Ok(if report.verified {
                Verdict::Ok
            } else if report.hit_resource_limit() {
                Verdict::OverBudget
            } else {
                Verdict::Violated
            });
        }
    }
    Ok(Verdict::Ok)
}

pub fn jamison(cmd: JamisonCmd, out: &Output) -> Result<Verdict> {
    let limits = out.config.limits();
    match cmd {
        JamisonCmd::System { space, points } => {
            let oracle = load_oracle(&space.space, &limits)?;
            let set = parse_set(points.set.as_deref(), oracle.ground_size())?;
            out.report(&build_jamison_system(&oracle, &set, &limits)?)?;
        }
        JamisonCmd::Tverberg { space, points, k } => {
            let oracle = load_oracle(&space.space, &limits)?;
            let set = parse_set(points.set.as_deref(), oracle.ground_size())?;
            let system = build_jamison_system(&oracle, &set, &limits)?;
            out.report(&jamison_tverberg(&oracle, &system, &set, k)?)?;
        }
        JamisonCmd::Selection { space, points } => {
            let oracle = load_oracle(&space.space, &limits)?;
            let set = parse_set(points.set.as_deref(), oracle.ground_size())?;
            let stat = selection_statistic(&oracle, &set)?;
            out.report(&stat)?;
            return Ok(Verdict::from_holds(stat.meets_bound));
        }
    }
    Ok(Verdict::Ok)
}

/// Coordinates separated by `|`, elements by commas or spaces.
fn parse_tuple(text: &str, ground: usize) -> Result<Vec<SubsetMask>> {
    text.split('|')
        .map(|c| {
            let pts = parse_points(Some(c), ground)?;
            if pts.is_empty() {
                bail!(usage(format!("empty coordinate in {text:?}")));
            }
            Ok(pts.into_iter().collect())
        })
        .collect()
}

pub fn bounds(cmd: BoundsCmd, out: &Output) -> Result<Verdict> {
    let limits = out.config.limits();
    let seed = out.config.seed;
    match cmd {
        BoundsCmd::Shadow { input } => {
            #[derive(Serialize)]
            struct ShadowReport {
                size: usize,
                shadow_size: usize,
                shadow: bounds::TupleFamily,
            }
            let family = bounds::text::parse_tuple_family(&read_source(&input)?)?;
            let sh = shadow(&family)?;
            out.report(&ShadowReport {
                size: family.len(),
                shadow_size: sh.len(),
                shadow: sh,
            })?;
        }
        BoundsCmd::Kk {
            input,
            exhaustive_pairs,
            random,
            max_d,
            max_r,
            max_ground,
        } => match (input, exhaustive_pairs, random) {
            (Some(path), None, None) => {
                let family = bounds::text::parse_tuple_family(&read_source(&path)?)?;
                let report = check_kk_bound(&family)?;
                out.report(&report)?;
                return Ok(Verdict::from_holds(report.holds));
            }
            (None, Some(g), None) => {
                let summary = kk_exhaustive_pairs(g)?;
                out.report(&summary)?;
                return Ok(Verdict::from_holds(summary.violations == 0));
            }
            (None, None, Some(count)) => {
                let summary = kk_random(count, max_d, max_r, max_ground, seed)?;
                out.report(&summary)?;
                return Ok(Verdict::from_holds(summary.violations == 0));
            }
            _ => bail!(usage("give one of --in, --exhaustive-pairs or --random")),
        },
        BoundsCmd::Rgood {
            ground,
            a,
            d,
            r,
            samples,
            tuple,
        } => {
            if let Some(text) = tuple {
                #[derive(Serialize)]
                struct GoodReport {
                    tuple: Vec<SubsetMask>,
                    r: usize,
                    good: bool,
                }
                let t = parse_tuple(&text, ground)?;
                if t.len() > 64 {
                    bail!(usage("tuples have at most 64 coordinates"));
                }
                out.report(&GoodReport {
                    good: is_r_good(&t, r),
                    tuple: t,
                    r,
                })?;
                return Ok(Verdict::Ok);
            }
            let (Some(a), Some(d)) = (a, d) else {
                bail!(usage("counting needs --a and --d (or pass --tuple)"));
            };
            let report = count_r_bad(ground, a, d, r, samples, seed)?;
            out.report(&report)?;
            return Ok(Verdict::from_holds(report.holds));
        }
        BoundsCmd::Turan { input, l, sweep } => match (input, sweep) {
            (Some(path), None) => {
                #[derive(Serialize)]
                struct TuranReport {
                    n: usize,
                    s: usize,
                    edges: usize,
                    l: usize,
                    below_threshold: bool,
                    independent_set: Option<SubsetMask>,
                }
                let l = l.expect("clap requires --l with --in");
                let h = bounds::text::parse_hypergraph(&read_source(&path)?)?;
                let below = below_turan_threshold(h.n(), h.s(), h.edges().len(), l);
                let found = turan_independent(&h, l)?;
                out.report(&TuranReport {
                    n: h.n(),
                    s: h.s(),
                    edges: h.edges().len(),
                    l,
                    below_threshold: below,
                    independent_set: found,
                })?;
                return Ok(Verdict::from_holds(!below || found.is_some()));
            }
            (None, Some(max_n)) => {
                let report = turan_graph_sweep(max_n)?;
                out.report(&report)?;
                return Ok(Verdict::from_holds(report.failures == 0));
            }
            _ => bail!(usage("give --in with --l, or --sweep")),
        },
        BoundsCmd::Indep {
            input,
            s,
            t,
            random,
            max_n,
        } => match (input, random) {
            (Some(path), None) => {
                let g = bounds::text::parse_hypergraph(&read_source(&path)?)?;
                let report =
                    local_to_global_independent(&g, s.expect("required"), t.expect("required"))?;
                out.report(&report)?;
                return Ok(Verdict::from_holds(!report.counterexample));
            }
            (None, Some(count)) => {
                let report = local_to_global_sweep(count, max_n, seed)?;
                out.report(&report)?;
                return Ok(Verdict::from_holds(report.counterexamples == 0));
            }
            _ => bail!(usage("give --in with --s and --t, or --random")),
        },
        BoundsCmd::Disjoint {
            space,
            points,
            t,
            k,
        } => {
            let oracle = load_oracle(&space.space, &limits)?;
            let set = parse_set(points.set.as_deref(), oracle.ground_size())?;
            match (t, k) {
                (Some(t), None) => {
                    out.report(&jamison_disjoint_subsets(&oracle, &set, t, &limits)?)?;
                }
                (None, Some(k)) => {
                    #[derive(Serialize)]
                    struct KReport {
                        k: usize,
                        found: bool,
                        result: Option<bounds::CommonFamily>,
                    }
                    let result = find_k_disjoint_common(&oracle, &set, k, &limits)?;
                    out.report(&KReport {
                        k,
                        found: result.is_some(),
                        result,
                    })?;
                }
                _ => bail!(usage("give --t or --k")),
            }
        }
    }
    Ok(Verdict::Ok)
}
