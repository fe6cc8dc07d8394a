//! `toric`: command-line front end for the exact toric-domain invariants.
//!
//! Every numeric value is printed exactly ("p/q" for rationals,
//! "a + b*sqrt(s)" for quadratic irrationals); `--float` adds a decimal
//! display column where it makes sense. Output is byte-identical across
//! repeated runs with the same inputs. Exit codes: 0 success, 1 domain
//! error (bad values, impossible requests), 2 usage error.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

use toric::classes;
use toric::cremona;
use toric::domains::{parse_polygon, parse_tuple, WeightTuple};
use toric::ech;
use toric::exactnum::{format_rational, parse_rational, parse_surd, rational_to_f64, Rational};
use toric::staircase;
use toric::weights;
use toric::capacityfn;

#[derive(Parser)]
#[command(
    name = "toric",
    version,
    about = "Exact invariants of convex toric domains and ellipsoid embeddings",
    long_about = "Exact invariants of convex toric domains and ellipsoid embeddings.\n\n\
        CSV schemas (stable within a major release):\n\
        weights:      z, cf, weights (space-separated)\n\
        cut:          head, cuts, perimeter, volume, accumulation_point\n\
        capacities:   k, c_k [, float]\n\
        subleading:   k, c_k, radicand [, float]   (e_k = c_k - sqrt(radicand))\n\
        cremona:      step, i, j, k, defect        (trailing summary comments)\n\
        classes:      d, mtilde, m, center\n\
        embed-fn:     z, ech_lower, class_lower, volume, best [, float]\n\
        accumulation, staircase, ghost: JSON reports."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Continued fraction and integral weight expansion of a rational z >= 1
    Weights {
        /// The rational, e.g. "22/9"
        z: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cut a rational polygon (file: one "x y" vertex per line) into its
    /// weight tuple
    Cut {
        #[arg(long)]
        polygon: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ECH capacity sequence c_0..c_K of a convex toric domain
    Capacities {
        /// Weight tuple "b: b1, b2, ..."
        #[arg(long)]
        tuple: Option<String>,
        #[arg(long)]
        polygon: Option<PathBuf>,
        #[arg(long = "K", default_value_t = 50)]
        kmax: u64,
        /// Append a decimal display column
        #[arg(long)]
        float: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Subleading terms e_k = c_k - sqrt(2 k Vol) for k = 1..K
    Subleading {
        #[arg(long)]
        tuple: Option<String>,
        #[arg(long)]
        polygon: Option<PathBuf>,
        #[arg(long = "K", default_value_t = 100)]
        kmax: u64,
        #[arg(long)]
        float: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cremona-reduce a weight tuple, or test a class vector "(d; m1, ...;
    /// n1, ...)" for exceptionality
    Cremona {
        #[arg(long)]
        tuple: Option<String>,
        /// Class "(d; cut multiplicities; weight multiplicities)"
        #[arg(long)]
        class: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate Diophantine obstruction classes for a target, up to degree
    /// dmax
    Classes {
        #[arg(long)]
        tuple: Option<String>,
        #[arg(long)]
        polygon: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        dmax: i128,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified lower bounds for the ellipsoid embedding function on a
    /// rational grid, with exact corner detection
    EmbedFn {
        #[arg(long)]
        tuple: Option<String>,
        #[arg(long)]
        polygon: Option<PathBuf>,
        #[arg(long = "K", default_value_t = 100)]
        kmax: u64,
        #[arg(long, default_value_t = 5)]
        dmax: i128,
        /// Left end of the grid (rational)
        #[arg(long, default_value = "1")]
        zmin: String,
        /// Right end of the grid (rational)
        #[arg(long)]
        zmax: String,
        /// Number of evenly spaced grid points
        #[arg(long, default_value_t = 50)]
        points: u64,
        #[arg(long)]
        float: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact bounds at the accumulation point of the embedding function
    /// (JSON report)
    Accumulation {
        #[arg(long)]
        tuple: Option<String>,
        #[arg(long)]
        polygon: Option<PathBuf>,
        #[arg(long = "K", default_value_t = 100)]
        kmax: u64,
        #[arg(long, default_value_t = 5)]
        dmax: i128,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate and verify a recursive staircase family (JSON report)
    Staircase {
        /// Family index (odd target ellipsoids E(1, 2n+3/2))
        #[arg(long)]
        n: u32,
        /// Last step index to generate
        #[arg(long, default_value_t = 8)]
        k: usize,
        /// "all" runs every check (perfectness, obstructiveness, matrix
        /// relations); "basic" checks only the recursion and adjacency
        #[arg(long, default_value = "all")]
        verify: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ghost-stairs analysis of an irrational ellipsoid E(1, alpha)
    /// (JSON report)
    Ghost {
        /// Quadratic irrational "a + b*sqrt(s)", e.g. "1 + 1*sqrt(2)"
        #[arg(long)]
        alpha: String,
        /// Number of convergent steps
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Domain(String),
}

impl From<toric::Error> for CliError {
    fn from(e: toric::Error) -> CliError {
        CliError::Domain(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(msg)) => {
            eprintln!("toric: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("toric: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn target_tuple(tuple: &Option<String>, polygon: &Option<PathBuf>) -> CliResult<WeightTuple> {
    match (tuple, polygon) {
        (Some(t), None) => Ok(parse_tuple(t)?),
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Domain(format!("cannot read {}: {e}", p.display())))?;
            Ok(WeightTuple::from_polygon(&parse_polygon(&text)?)?)
        }
        _ => Err(CliError::Usage(
            "provide exactly one of --tuple or --polygon".into(),
        )),
    }
}

fn rationals_spaced(xs: &[Rational]) -> String {
    xs.iter()
        .map(format_rational)
        .collect::<Vec<_>>()
        .join(" ")
}

fn ints_spaced<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn json_doc(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn run(cmd: Cmd) -> CliResult<()> {
    match cmd {
        Cmd::Weights { z, format, out } => {
            let z = parse_rational(&z)?;
            let cf = weights::cf_of(z.numer(), z.denom())?;
            let w = weights::integral_weights(z.numer(), z.denom())?;
            let cf_str = format!(
                "[{}]",
                cf.entries()
                    .iter()
                    .enumerate()
                    .map(|(i, a)| format!("{}{a}", if i == 1 { ";" } else if i > 1 { "," } else { "" }))
                    .collect::<String>()
            );
            let text = match format {
                Format::Csv => format!(
                    "z,cf,weights\n{},{},{}\n",
                    format_rational(&z),
                    cf_str,
                    ints_spaced(&w)
                ),
                Format::Json => json_doc(json!({
                    "z": format_rational(&z),
                    "cf": cf.entries().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                    "weights": w.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                })),
            };
            emit(&out, &text)
        }

        Cmd::Cut {
            polygon,
            format,
            out,
        } => {
            let tuple = target_tuple(&None, &Some(polygon))?;
            let a0 = tuple.accumulation_point();
            let a0_str = a0.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
            let text = match format {
                Format::Csv => format!(
                    "head,cuts,perimeter,volume,accumulation_point\n{},{},{},{},{}\n",
                    format_rational(&tuple.head),
                    rationals_spaced(&tuple.cuts),
                    format_rational(&tuple.perimeter()),
                    format_rational(&tuple.volume()),
                    a0_str
                ),
                Format::Json => json_doc(json!({
                    "head": format_rational(&tuple.head),
                    "cuts": tuple.cuts.iter().map(format_rational).collect::<Vec<_>>(),
                    "perimeter": format_rational(&tuple.perimeter()),
                    "volume": format_rational(&tuple.volume()),
                    "accumulation_point": a0_str,
                })),
            };
            emit(&out, &text)
        }

        Cmd::Capacities {
            tuple,
            polygon,
            kmax,
            float,
            format,
            out,
        } => {
            let target = target_tuple(&tuple, &polygon)?;
            let caps = ech::convex_capacities(&target, kmax)?;
            let text = match format {
                Format::Csv => {
                    let mut s = String::from(if float { "k,c_k,float\n" } else { "k,c_k\n" });
                    for (k, c) in caps.iter().enumerate() {
                        s.push_str(&format!("{k},{}", format_rational(c)));
                        if float {
                            s.push_str(&format!(",{}", rational_to_f64(c)));
                        }
                        s.push('\n');
                    }
                    s
                }
                Format::Json => json_doc(json!({
                    "tuple": target.to_string(),
                    "capacities": caps.iter().map(format_rational).collect::<Vec<_>>(),
                })),
            };
            emit(&out, &text)
        }

        Cmd::Subleading {
            tuple,
            polygon,
            kmax,
            float,
            format,
            out,
        } => {
            let target = target_tuple(&tuple, &polygon)?;
            let vol = target.volume();
            let caps = ech::convex_capacities(&target, kmax)?;
            let terms: Vec<ech::SubleadingTerm> = (1..=kmax)
                .map(|k| ech::SubleadingTerm::new(k, caps[k as usize].clone(), &vol))
                .collect();
            let text = match format {
                Format::Csv => {
                    let mut s = String::from(if float {
                        "k,c_k,radicand,float\n"
                    } else {
                        "k,c_k,radicand\n"
                    });
                    for t in &terms {
                        s.push_str(&format!(
                            "{},{},{}",
                            t.k,
                            format_rational(&t.capacity),
                            format_rational(&t.radicand)
                        ));
                        if float {
                            s.push_str(&format!(",{}", t.to_f64()));
                        }
                        s.push('\n');
                    }
                    s
                }
                Format::Json => json_doc(json!({
                    "tuple": target.to_string(),
                    "volume": format_rational(&vol),
                    "terms": terms.iter().map(|t| json!({
                        "k": t.k,
                        "capacity": format_rational(&t.capacity),
                        "radicand": format_rational(&t.radicand),
                        "float": t.to_f64(),
                    })).collect::<Vec<_>>(),
                })),
            };
            emit(&out, &text)
        }

        Cmd::Cremona {
            tuple,
            class,
            format,
            out,
        } => match (tuple, class) {
            (Some(t), None) => {
                let t = parse_tuple(&t)?;
                let (head, cuts, defects) = cremona::reduce_tuple(&t.head, &t.cuts)?;
                let text = match format {
                    Format::Csv => format!(
                        "head,cuts,reduced_head,reduced_cuts,moves\n{},{},{},{},{}\n",
                        format_rational(&t.head),
                        rationals_spaced(&t.cuts),
                        format_rational(&head),
                        rationals_spaced(&cuts),
                        defects.len()
                    ),
                    Format::Json => json_doc(json!({
                        "head": format_rational(&t.head),
                        "cuts": t.cuts.iter().map(format_rational).collect::<Vec<_>>(),
                        "reduced_head": format_rational(&head),
                        "reduced_cuts": cuts.iter().map(format_rational).collect::<Vec<_>>(),
                        "defects": defects.iter().map(format_rational).collect::<Vec<_>>(),
                        "moves": defects.len(),
                    })),
                };
                emit(&out, &text)
            }
            (None, Some(c)) => {
                let class = classes::parse_class(&c)?;
                let vector = cremona::ClassVector::from_class(&class);
                let (exceptional, steps) = cremona::is_exceptional(&vector)?;
                let text = match format {
                    Format::Csv => {
                        let mut s = String::from("step,i,j,k,defect\n");
                        for (n, st) in steps.iter().enumerate() {
                            s.push_str(&format!(
                                "{},{},{},{},{}\n",
                                n + 1,
                                st.indices[0],
                                st.indices[1],
                                st.indices[2],
                                st.defect
                            ));
                        }
                        s.push_str(&format!("# exceptional: {exceptional}\n"));
                        s
                    }
                    Format::Json => json_doc(json!({
                        "class": class.to_string(),
                        "exceptional": exceptional,
                        "steps": steps.iter().map(|st| json!({
                            "indices": st.indices,
                            "defect": st.defect.to_string(),
                        })).collect::<Vec<_>>(),
                    })),
                };
                emit(&out, &text)
            }
            _ => Err(CliError::Usage(
                "provide exactly one of --tuple or --class".into(),
            )),
        },

        Cmd::Classes {
            tuple,
            polygon,
            dmax,
            format,
            out,
        } => {
            let target = target_tuple(&tuple, &polygon)?.sorted();
            let set = classes::enumerate_classes(&target, dmax)?;
            let row = |c: &classes::ObstructionClass| -> (String, String, String, String) {
                let center = class_center_string(c);
                (
                    c.d.to_string(),
                    ints_spaced(&c.mtilde),
                    ints_spaced(&c.m),
                    center,
                )
            };
            let text = match format {
                Format::Csv => {
                    let mut s = String::from("d,mtilde,m,center\n");
                    for c in &set {
                        let (d, mt, m, center) = row(c);
                        s.push_str(&format!("{d},{mt},{m},{center}\n"));
                    }
                    s
                }
                Format::Json => json_doc(json!({
                    "tuple": target.to_string(),
                    "dmax": dmax.to_string(),
                    "classes": set.iter().map(|c| {
                        let (d, mt, m, center) = row(c);
                        json!({"d": d, "mtilde": mt, "m": m, "center": center})
                    }).collect::<Vec<_>>(),
                })),
            };
            emit(&out, &text)
        }

        Cmd::EmbedFn {
            tuple,
            polygon,
            kmax,
            dmax,
            zmin,
            zmax,
            points,
            float,
            format,
            out,
        } => {
            let target = target_tuple(&tuple, &polygon)?;
            let zmin = parse_rational(&zmin)?;
            let zmax = parse_rational(&zmax)?;
            if zmax < zmin {
                return Err(CliError::Domain("zmax must be >= zmin".into()));
            }
            if points == 0 {
                return Err(CliError::Usage("need at least one grid point".into()));
            }
            let grid: Vec<Rational> = if points == 1 {
                vec![zmin]
            } else {
                let step = (&zmax - &zmin)
                    / Rational::from(num_bigint::BigInt::from(points - 1));
                (0..points)
                    .map(|i| &zmin + &step * Rational::from(num_bigint::BigInt::from(i)))
                    .collect()
            };
            let res = capacityfn::scan(&target, &grid, kmax, dmax)?;
            let a0_str = res
                .a0
                .as_ref()
                .map(|s| s.to_string())
                .unwrap_or_else(|| "none".into());
            let text = match format {
                Format::Csv => {
                    let mut s = String::from(if float {
                        "z,ech_lower,class_lower,volume,best,float\n"
                    } else {
                        "z,ech_lower,class_lower,volume,best\n"
                    });
                    for sample in &res.samples {
                        s.push_str(&format!(
                            "{},{},{},{},{}",
                            format_rational(&sample.z),
                            format_rational(&sample.ech_lower),
                            format_rational(&sample.class_lower),
                            sample.volume_bound,
                            sample.best
                        ));
                        if float {
                            s.push_str(&format!(",{}", sample.best.to_f64()));
                        }
                        s.push('\n');
                    }
                    for c in &res.corners {
                        s.push_str(&format!("# corner: {}\n", format_rational(c)));
                    }
                    s.push_str(&format!("# a0: {a0_str}\n"));
                    s.push_str(&format!(
                        "# degree_certificate: {}\n",
                        res.degree_certificate
                    ));
                    s
                }
                Format::Json => json_doc(json!({
                    "tuple": target.to_string(),
                    "samples": res.samples.iter().map(|s| json!({
                        "z": format_rational(&s.z),
                        "ech_lower": format_rational(&s.ech_lower),
                        "class_lower": format_rational(&s.class_lower),
                        "volume": s.volume_bound.to_string(),
                        "best": s.best.to_string(),
                        "at_corner": s.at_corner,
                    })).collect::<Vec<_>>(),
                    "corners": res.corners.iter().map(format_rational).collect::<Vec<_>>(),
                    "a0": a0_str,
                    "degree_certificate": res.degree_certificate,
                })),
            };
            emit(&out, &text)
        }

        Cmd::Accumulation {
            tuple,
            polygon,
            kmax,
            dmax,
            out,
        } => {
            let target = target_tuple(&tuple, &polygon)?;
            let rep = capacityfn::accumulation_report(&target, kmax, dmax)?;
            let opt = |s: &Option<toric::exactnum::Surd>| -> Value {
                s.as_ref()
                    .map(|x| Value::String(x.to_string()))
                    .unwrap_or(Value::Null)
            };
            let text = json_doc(json!({
                "tuple": target.to_string(),
                "a0": opt(&rep.a0),
                "volume_at_a0": opt(&rep.volume_at_a0),
                "class_bound": opt(&rep.class_bound),
                "ech_bound": opt(&rep.ech_bound),
                "bound_exceeds_volume": rep.bound_exceeds_volume,
                "bound_equals_volume": rep.bound_equals_volume,
                "degree_certificate": rep.degree_certificate,
                "no_staircase_certified": rep.no_staircase_certified,
            }));
            emit(&out, &text)
        }

        Cmd::Staircase { n, k, verify, out } => {
            let all = match verify.as_str() {
                "all" => true,
                "basic" => false,
                other => {
                    return Err(CliError::Usage(format!(
                        "--verify must be \"all\" or \"basic\", got {other:?}"
                    )))
                }
            };
            let family = staircase::make_family(n)?;
            let steps = staircase::generate_steps(&family, k)?;
            // generate_steps already enforces the recursion, adjacency of
            // consecutive steps and strictly decreasing centers.
            let quasi_perfect = steps.iter().all(|s| s.satisfies_relations());
            let steps_json: Vec<Value> = steps
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    json!({
                        "k": i,
                        "d": s.d.to_string(),
                        "p": s.p.to_string(),
                        "q": s.q.to_string(),
                        "center": format_rational(&s.center_big()),
                        "mtilde": ints_spaced(&s.mtilde),
                    })
                })
                .collect();
            let mut verdicts = serde_json::Map::new();
            verdicts.insert("quasi_perfect".into(), json!(quasi_perfect));
            verdicts.insert("adjacent_consecutive".into(), json!(true));
            verdicts.insert("centers_strictly_decreasing".into(), json!(true));
            let mut doc = serde_json::Map::new();
            doc.insert("n".into(), json!(n));
            doc.insert("t".into(), json!(family.t.to_string()));
            doc.insert("steps".into(), Value::Array(steps_json));
            if all {
                verdicts.insert(
                    "perfect".into(),
                    json!(staircase::verify_perfect(&family, k)?),
                );
                verdicts.insert(
                    "obstructive".into(),
                    json!(staircase::verify_obstructive(&family, k)?),
                );
                verdicts.insert(
                    "matrix_relations".into(),
                    json!(staircase::matrix_relation_check(n, k)?),
                );
                let dom = staircase::limit_domain(&family)?;
                doc.insert(
                    "limit".into(),
                    json!({
                        "beta": dom.beta.to_string(),
                        "volume": dom.vol.to_string(),
                        "perimeter": dom.per.to_string(),
                        "z_inf": dom.z_inf.to_string(),
                        "v_inf": dom.v_inf.to_string(),
                    }),
                );
            }
            doc.insert("verdicts".into(), Value::Object(verdicts));
            emit(&out, &json_doc(Value::Object(doc)))
        }

        Cmd::Ghost { alpha, k, out } => {
            let alpha = parse_surd(&alpha)?;
            let rep = staircase::ghost_stairs(&alpha, k)?;
            let text = json_doc(json!({
                "alpha": rep.alpha.to_string(),
                "integer_part": rep.k.to_string(),
                "cover_class_verified": rep.cover_class_verified,
                "steps": rep.steps.iter().map(|s| json!({
                    "index": s.index,
                    "p": s.p.to_string(),
                    "q": s.q.to_string(),
                    "descending": s.descending,
                    "quasi_perfect": s.quasi_perfect,
                    "perfect": s.perfect,
                    "mu": s.mu.to_string(),
                    "expected": s.expected.to_string(),
                    "flush_with_capacity": s.flush_with_capacity,
                })).collect::<Vec<_>>(),
            }));
            emit(&out, &text)
        }
    }
}

/// Center `p/q` of a quasi-perfect class (its `m` is exactly `W(p, q)`), or
/// an empty string.
fn class_center_string(class: &classes::ObstructionClass) -> String {
    use num_integer::Integer;
    let Some(&q) = class.m.first() else {
        return String::new();
    };
    let sum: i128 = class.m.iter().sum();
    let p = sum - q + 1;
    if q < 1 || p < q || p.gcd(&q) != 1 {
        return String::new();
    }
    let (pb, qb) = (
        num_bigint::BigInt::from(p),
        num_bigint::BigInt::from(q),
    );
    match weights::integral_weights(&pb, &qb) {
        Ok(w) if w == class.m.iter().map(|&x| num_bigint::BigInt::from(x)).collect::<Vec<_>>() => {
            format!("{p}/{q}")
        }
        _ => String::new(),
    }
}
