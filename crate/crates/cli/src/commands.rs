use nlcore::arith::{int, parse_rational, Rational};
use nlcore::bounds::{c_bound, enumerate_s, SlopeTable};
use nlcore::discform::{DiscElement, DiscriminantForm};
use nlcore::eisenstein::{Eisenstein, CALIBRATION_VERSION};
use nlcore::lattice::IntegerLattice;
use nlcore::nlpic::{
    eisenstein_partner, generating_set, hodge_via_eisenstein, hodge_via_theta, max_index, pair, pairing_forms,
    relation_from_source, verify_primitive_representatives, DivisorClassExpr, Flavor, RelationSource,
};
use nlcore::slope::{cubic_slope_bounds, k3deg2_slope_bounds, SlopeBounds};
use nlcore::theta::theta_qexp;
use serde_json::{json, Value};

use crate::cache::{Cache, Status};
use crate::error::{CliError, PRECONDITION};
use crate::lattice_arg::{lattice_hash, parse_lattice};
use crate::{Command, FlavorArg, LatticeCmd, MethodArg, SlopeTarget};

pub struct Output {
    pub name: &'static str,
    pub json: String,
    pub lattice_hash: Option<String>,
    pub status: Status,
}

fn rational(s: &str, what: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|_| CliError::bad_input(format!("{what}: cannot parse {s:?} as a rational")))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn s(r: &Rational) -> String {
    r.to_string()
}

fn lattice_info(l: &IntegerLattice) -> Result<Value, CliError> {
    let sig = l.signature()?;
    let d = DiscriminantForm::of(l)?;
    Ok(json!({
        "provenance": l.provenance().to_string(),
        "rank": l.rank(),
        "signature": {"b_plus": sig.b_plus, "b_minus": sig.b_minus},
        "determinant": l.determinant().to_string(),
        "even": true,
        "hyperbolic_planes": l.hyperbolic_planes(),
        "discriminant": {
            "invariants": d.invariants(),
            "order": d.order(),
            "level": d.level(),
            "milgram_signature": d.milgram_signature()?,
        },
        "gram": l.gram().to_i64_rows(),
        "hash": lattice_hash(l),
    }))
}

fn parse_indices(d: &DiscriminantForm, text: &str) -> Result<Vec<(Rational, DiscElement)>, CliError> {
    text.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (m, mu) = t
                .trim()
                .split_once(':')
                .ok_or_else(|| CliError::bad_input(format!("index {t:?} is not m:[mu]")))?;
            let mu: Vec<u64> =
                serde_json::from_str(mu).map_err(|_| CliError::bad_input(format!("bad coset {mu:?}")))?;
            let mu = DiscElement(mu);
            d.check(&mu)?;
            Ok((rational(m, "index")?, mu))
        })
        .collect()
}

fn source_of(l: &IntegerLattice, spec: &str, n: u32) -> Result<(RelationSource, String), CliError> {
    if spec == "eisenstein" {
        let x = eisenstein_partner(l, n)?;
        let label = format!("eisenstein:{}", x.provenance());
        return Ok((RelationSource::Eisenstein(x), label));
    }
    match spec.strip_prefix("theta:") {
        Some(q) => Ok((RelationSource::Theta(parse_lattice(q, None)?), spec.to_string())),
        None => Err(CliError::bad_input(format!("source {spec:?} is neither theta:<lattice> nor eisenstein"))),
    }
}

fn relation_json(rel: &DivisorClassExpr) -> Value {
    json!({
        "expr": serde_json::to_value(rel).expect("serializable"),
        "display": rel.to_string(),
        "max_index": s(&max_index(rel)),
    })
}

fn slope_json(b: &SlopeBounds) -> Value {
    let mut v = serde_json::to_value(b).expect("serializable");
    v["slope_fraction"] = json!(format!("{}/{}", b.expr.alpha, b.expr.beta));
    v
}

/// Computes the command's JSON, going through the cache for everything but
/// lattice info.
pub fn run(cmd: &Command, cache: &Cache) -> Result<Output, CliError> {
    let (name, lattice) = match cmd {
        Command::Lattice { what: LatticeCmd::Info { lattice, d } } => ("lattice info", Some(parse_lattice(lattice, *d)?)),
        Command::Theta { lattice, d, .. } => ("theta", Some(parse_lattice(lattice, *d)?)),
        Command::Eisenstein { lattice, d, .. } => ("eisenstein", Some(parse_lattice(lattice, *d)?)),
        Command::Hodge { .. } => ("hodge", None),
        Command::Generators { lattice, d, .. } => ("generators", Some(parse_lattice(lattice, *d)?)),
        Command::Relation { lattice, d, .. } => ("relation", Some(parse_lattice(lattice, *d)?)),
        Command::Bounds { lattice, d, .. } => (
            "bounds",
            lattice.as_ref().map(|l| parse_lattice(l, *d)).transpose()?,
        ),
        Command::Slope { .. } => ("slope", None),
        Command::PairingCheck { lattice, d, .. } => ("pairing-check", Some(parse_lattice(lattice, *d)?)),
    };
    let hash = lattice.as_ref().map(lattice_hash);
    if let (Command::Lattice { .. }, Some(l)) = (cmd, &lattice) {
        return Ok(Output {
            name,
            json: pretty(&lattice_info(l)?),
            lattice_hash: hash,
            status: Status::Disabled,
        });
    }
    let table = match cmd {
        Command::Bounds { slope_table: Some(p), .. } => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::bad_input(format!("{}: {e}", p.display())))?;
            let t: SlopeTable =
                serde_json::from_str(&text).map_err(|e| CliError::bad_input(format!("{}: {e}", p.display())))?;
            if t.get(1)? != &Rational::from_integer(12.into()) {
                return Err(nlcore::bounds::BoundsError::FixedSlope.into());
            }
            t
        }
        _ => SlopeTable::default(),
    };
    let params = format!("{cmd:?}|table={}", serde_json::to_string(&table).expect("serializable"));
    let key = Cache::key(name, hash.as_deref().unwrap_or("-"), &params);
    let (json, status) = cache.get_or_compute(&key, || compute(cmd, lattice.as_ref(), &table).map(|v| pretty(&v)))?;
    Ok(Output {
        name,
        json,
        lattice_hash: hash,
        status,
    })
}

fn compute(cmd: &Command, lattice: Option<&IntegerLattice>, table: &SlopeTable) -> Result<Value, CliError> {
    let l = || lattice.expect("parsed above");
    match cmd {
        Command::Lattice { .. } => unreachable!("not cached"),
        Command::Theta { max_m, .. } => {
            let t = rational(max_m, "--max-m")?;
            let th = theta_qexp(l(), &t)?;
            Ok(json!({"lattice_hash": lattice_hash(l()), "theta": serde_json::to_value(th.to_json()).expect("serializable")}))
        }
        Command::Eisenstein { weight, indices, max_m, .. } => {
            let w = rational(weight, "--weight")?;
            let two_k = &w * Rational::from_integer(2.into());
            if !two_k.is_integer() {
                return Err(CliError::bad_input(format!("weight {w} is not in Z/2")));
            }
            let two_k: i64 = two_k.to_integer().try_into().map_err(|_| CliError::bad_input("weight too large"))?;
            let e = Eisenstein::new(l(), two_k)?;
            let mut out = json!({
                "lattice_hash": lattice_hash(l()),
                "weight": s(&w),
                "calibration_version": CALIBRATION_VERSION,
            });
            match (indices, max_m) {
                (Some(ix), None) => {
                    let mut cs = vec![];
                    for (m, mu) in parse_indices(e.disc(), ix)? {
                        let c = e.coefficient(&m, &mu)?;
                        cs.push(json!({"m": s(&m), "mu": mu.0, "c": s(&c)}));
                    }
                    out["coefficients"] = Value::Array(cs);
                }
                (None, Some(t)) => {
                    let q = e.qexp(&rational(t, "--max-m")?)?;
                    out["eisenstein"] = serde_json::to_value(q.to_json()).expect("serializable");
                }
                _ => return Err(CliError::bad_input("give exactly one of --indices and --max-m")),
            }
            Ok(out)
        }
        Command::Hodge { d, method } => {
            let hc = match method {
                MethodArg::Theta => hodge_via_theta(*d)?,
                MethodArg::Eisenstein => hodge_via_eisenstein(*d)?,
            };
            let mut v = serde_json::to_value(&hc).expect("serializable");
            v["display"] = json!(hc.relation.to_string());
            Ok(v)
        }
        Command::Generators { flavor, strict, .. } => {
            let f = match flavor {
                FlavorArg::H => Flavor::H,
                FlavorArg::P => Flavor::P,
            };
            let gs = generating_set(l(), f)?;
            let mut v = json!({
                "flavor": format!("{f:?}"),
                "bound": s(&gs.bound),
                "with_lambda": gs.with_lambda,
                "count": gs.symbols.len(),
                "symbols": gs.symbols.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            });
            if let Some(p) = &gs.presentation {
                v["presentation"] = Value::Array(
                    p.iter()
                        .map(|g| {
                            json!({
                                "delta": g.delta,
                                "symbol": g.symbol.to_string(),
                                "degenerate": g.degenerate,
                                "nl_discriminant": s(&g.nl_discriminant),
                            })
                        })
                        .collect(),
                );
            }
            if *strict {
                let reps = verify_primitive_representatives(l(), &gs.symbols)?;
                v["representatives"] = json!(reps.iter().map(|x| x.iter().map(s).collect::<Vec<_>>()).collect::<Vec<_>>());
            }
            Ok(v)
        }
        Command::Relation { n, source, .. } => {
            let (src, label) = source_of(l(), source, *n)?;
            let rel = relation_from_source(l(), &src, *n)?;
            let mut v = relation_json(&rel);
            v["source"] = json!(label);
            v["N"] = json!(n);
            Ok(v)
        }
        Command::Bounds { g, k, .. } => {
            let k = rational(k, "--k")?;
            let cs: Result<Vec<Value>, CliError> = (1..=*g)
                .map(|i| {
                    let c = c_bound(i, *g, &k, table)?;
                    Ok(json!({"i": i, "value": s(&c.value), "closed_form": s(&c.closed_form)}))
                })
                .collect();
            let mut v = json!({
                "g": g,
                "k": s(&k),
                "slope_table": serde_json::to_value(table).expect("serializable"),
                "C": cs?,
            });
            if let Some(l) = lattice {
                let set = enumerate_s(&k, *g, l, table)?;
                v["count"] = json!(set.len());
                v["index_set"] = serde_json::to_value(&set).expect("serializable");
            }
            Ok(v)
        }
        Command::Slope { target } => Ok(slope_json(&match target {
            SlopeTarget::Cubic => cubic_slope_bounds()?,
            SlopeTarget::K3deg2 => k3deg2_slope_bounds()?,
        })),
        Command::PairingCheck { n, source, .. } => {
            let (src, label) = source_of(l(), source, *n)?;
            let rel = relation_from_source(l(), &src, *n)?;
            let disc = DiscriminantForm::of(l())?;
            let trunc = max_index(&rel).max(int(1));
            let forms = pairing_forms(l(), &trunc)?;
            if forms.is_empty() {
                return Err(CliError::new(
                    PRECONDITION,
                    "nlpic",
                    "no_test_form",
                    "no catalog theta series matches the discriminant form",
                ));
            }
            let mut results = vec![];
            let mut all_zero = true;
            for g in &forms {
                let p = pair(&rel, &disc, &g.form)?;
                all_zero &= p == int(0);
                results.push(json!({"label": g.label, "e4": g.e4_power, "e6": g.e6_power, "value": s(&p)}));
            }
            let mut v = relation_json(&rel);
            v["source"] = json!(label);
            v["forms"] = Value::Array(results);
            v["all_zero"] = json!(all_zero);
            Ok(v)
        }
    }
}
