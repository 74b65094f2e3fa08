//! One function per verb, each producing the JSON report.

use std::path::Path;

use bundle_pricing::baselines::{brev, brev_menu, srev, srev_menu};
use bundle_pricing::constk::{build_hyperplanes, enumerate_vertices, evaluate_candidates, solve_constk, PriceVector};
use bundle_pricing::formats::{CompFile, HardInstanceFile, InstanceFile, MenuFile, NumText};
use bundle_pricing::hardness::{
    build_hard_instance, build_hard_instance_unchecked, build_solutions, comp_to_compstar, count_tstar,
    decide_winner, CompInstance, CompStarInstance, Winner,
};
use bundle_pricing::iid2::{solve_iid2, Iid2Instance};
use bundle_pricing::market::{enumerate_valuations, expected_revenue, Bundle};
use bundle_pricing::oracles::{drev_bruteforce, mechanism_menu, mechanism_prices, rev_lp};
use bundle_pricing::scalar::{format_rational, parse_rational, to_decimal};
use bundle_pricing::{Error, ExactDistribution, ExactMenu, Limits, Rational};
use serde_json::{json, Map, Value};

use crate::{CliError, Command, GlobalOpts};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest hard-instance grid evaluated directly by compare-solutions.
const DIRECT_CHECK_GRID: usize = 1 << 12;

struct Report {
    map: Map<String, Value>,
    digits: usize,
}

impl Report {
    fn new(command: &str, digits: usize) -> Self {
        let mut map = Map::new();
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
        map.insert("command".into(), json!(command));
        Report { map, digits }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.map.insert(key.into(), value);
    }

    /// `key` as exact text plus `key_decimal` as an annotation.
    fn rational(&mut self, key: &str, r: &Rational) {
        self.set(key, json!(format_rational(r)));
        self.set(&format!("{key}_decimal"), json!(to_decimal(r, self.digits)));
    }

    fn finish(self) -> Value {
        Value::Object(self.map)
    }
}

fn texts(rs: &[Rational]) -> Value {
    Value::Array(rs.iter().map(|r| json!(format_rational(r))).collect())
}

fn menu_value(menu: &ExactMenu) -> Value {
    serde_json::to_value(MenuFile::of_menu(menu)).expect("menus serialize")
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn parse_json(text: &str, path: &Path) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("{} is not JSON: {e}", path.display())).into())
}

/// An instance file, or a hard-instance document carrying one.
fn load_instance(path: &Path) -> Result<ExactDistribution, CliError> {
    let text = read(path)?;
    let value = parse_json(&text, path)?;
    let inner = value.get("hard_instance").and_then(|h| h.get("instance")).or_else(|| value.get("instance"));
    let file: InstanceFile = match inner {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(format!("malformed instance: {e}")))?,
        None => InstanceFile::parse(&text)?,
    };
    Ok(file.to_distribution()?)
}

/// A menu file, or a report carrying a `menu` witness.
fn load_menu(path: &Path) -> Result<ExactMenu, CliError> {
    let text = read(path)?;
    let value = parse_json(&text, path)?;
    let file: MenuFile = match value.get("menu") {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(format!("malformed menu: {e}")))?,
        None => MenuFile::parse(&text)?,
    };
    Ok(file.to_menu()?)
}

/// A COMP file, or a reduce-comp report carrying the reduced instance.
fn load_comp(path: &Path) -> Result<CompInstance, CliError> {
    let text = read(path)?;
    let value = parse_json(&text, path)?;
    let file: CompFile = match value.get("compstar") {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(format!("malformed COMP data: {e}")))?,
        None => CompFile::parse(&text)?,
    };
    Ok(file.to_instance()?)
}

fn load_hard(path: &Path) -> Result<bundle_pricing::hardness::HardInstance, CliError> {
    let text = read(path)?;
    let value = parse_json(&text, path)?;
    let file: HardInstanceFile = match value.get("hard_instance") {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(format!("malformed hard instance: {e}")))?,
        None => HardInstanceFile::parse(&text)?,
    };
    Ok(file.to_instance()?)
}

fn limits(opts: &GlobalOpts) -> Result<Limits, CliError> {
    let mut l = Limits::default();
    if let Some(b) = opts.budget_allocations {
        if b == 0 {
            return Err(Error::Invalid("--budget-allocations must be positive".into()).into());
        }
        l.max_allocation_maps = b;
    }
    if let Some(b) = opts.budget_lp {
        if b == 0 {
            return Err(Error::Invalid("--budget-lp must be positive".into()).into());
        }
        l.lp.max_vars = b;
        l.lp.max_constraints = b.saturating_mul(8);
    }
    if let Some(k) = opts.max_items {
        l.max_constk_items = k;
    }
    Ok(l)
}

fn rational_arg(name: &str, text: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| Error::Invalid(format!("--{name}: {e}")).into())
}

fn bundle_prices(prices: &PriceVector<Rational>) -> Value {
    Value::Array(
        prices
            .0
            .iter()
            .enumerate()
            .map(|(j, p)| json!({"bundle": Bundle(j as u32 + 1).to_one_based(), "price": format_rational(p)}))
            .collect(),
    )
}

pub fn execute(cmd: &Command, opts: &GlobalOpts) -> Result<Value, CliError> {
    let lim = limits(opts)?;
    let digits = opts.decimal_digits;
    match cmd {
        Command::Srev { instance } => {
            let d = load_instance(instance)?;
            let res = srev(&d);
            let mut r = Report::new("srev", digits);
            r.rational("revenue", &res.revenue);
            r.set("prices", texts(&res.prices));
            r.set("menu", menu_value(&srev_menu(&res)?));
            Ok(r.finish())
        }
        Command::Brev { instance } => {
            let d = load_instance(instance)?;
            let res = brev(&d, &lim)?;
            let mut r = Report::new("brev", digits);
            r.rational("revenue", &res.revenue);
            r.rational("price", &res.prices[0]);
            r.set("menu", menu_value(&brev_menu(d.num_items(), &res)?));
            Ok(r.finish())
        }
        Command::DrevExact { instance } => {
            let d = load_instance(instance)?;
            let res = drev_bruteforce(&d, &lim)?;
            let grid: Vec<_> = enumerate_valuations(&d, &lim)?.into_iter().map(|(v, _)| v).collect();
            let prices = mechanism_prices(&grid, &res.alloc, &res.utilities);
            let mut r = Report::new("drev-exact", digits);
            r.rational("revenue", &res.revenue);
            r.set(
                "witness",
                json!({
                    "valuations": grid.iter().map(|v| texts(&v.0)).collect::<Vec<_>>(),
                    "allocation": res.alloc.0.iter().map(|b| b.to_one_based()).collect::<Vec<_>>(),
                    "utilities": texts(&res.utilities.0),
                    "prices": texts(&prices),
                }),
            );
            let menu = mechanism_menu(&grid, &res.alloc, &res.utilities)
                .ok_or_else(|| Error::Consistency("optimal mechanism has no menu form".into()))?;
            r.set("menu", menu_value(&menu));
            Ok(r.finish())
        }
        Command::RevLp { instance } => {
            let d = load_instance(instance)?;
            let mut r = Report::new("rev-lp", digits);
            r.rational("revenue", &rev_lp(&d, &lim)?);
            Ok(r.finish())
        }
        Command::SolveIid2 { n, a, b, p } => {
            let inst = Iid2Instance::new(*n, rational_arg("a", a)?, rational_arg("b", b)?, rational_arg("p", p)?)?;
            let sol = solve_iid2(&inst)?;
            let mut r = Report::new("solve-iid2", digits);
            r.set("k", json!(sol.k));
            r.rational("bundle_price", &sol.bundle_price);
            r.rational("item_price", &sol.item_price);
            r.rational("revenue", &sol.revenue);
            r.set("level_probs", texts(&sol.level_probs));
            r.set("menu", menu_value(&sol.menu(*n)?));
            Ok(r.finish())
        }
        Command::SolveConstk { instance, emit_candidates } => {
            let d = load_instance(instance)?;
            let res = solve_constk(&d, &lim)?;
            let mut r = Report::new("solve-constk", digits);
            r.rational("revenue", &res.revenue);
            r.set("best_prices", bundle_prices(&res.best_prices));
            r.set("candidates_examined", json!(res.candidates_examined));
            r.set("subsets_examined", json!(res.subsets_examined.to_string()));
            r.set("menu", menu_value(&res.best_prices.menu()?));
            if *emit_candidates {
                let planes = build_hyperplanes(&d, &lim)?;
                let vertices = enumerate_vertices(&planes, res.best_prices.0.len(), &lim)?;
                let revenues = evaluate_candidates(&d, &vertices, &lim)?;
                let list: Vec<Value> = vertices
                    .iter()
                    .zip(&revenues)
                    .map(|(v, rev)| json!({"prices": texts(&v.0), "revenue": format_rational(rev)}))
                    .collect();
                r.set("hyperplanes", json!(planes.len()));
                r.set("candidates", Value::Array(list));
            }
            Ok(r.finish())
        }
        Command::EvalMenu { instance, menu } => {
            let d = load_instance(instance)?;
            let m = load_menu(menu)?;
            let mut r = Report::new("eval-menu", digits);
            r.rational("revenue", &expected_revenue(&m, &d, &lim)?);
            r.set("menu_entries", json!(m.len()));
            Ok(r.finish())
        }
        Command::ReduceComp { input } => {
            let src = load_comp(input)?;
            let (star, t_prime) = comp_to_compstar(&src)?;
            let (c1, c2) = star.inner().conditions();
            let mut r = Report::new("reduce-comp", digits);
            r.set("source", serde_json::to_value(CompFile::of_instance(&src)).unwrap());
            r.set("compstar", serde_json::to_value(CompFile::of_instance(star.inner())).unwrap());
            r.set("t_prime", serde_json::to_value(NumText::of_integer(&t_prime)).unwrap());
            r.set("conditions", json!({"first": c1, "second": c2}));
            if let (Ok(a), Ok(b)) = (count_tstar(&src, &lim), count_tstar(star.inner(), &lim)) {
                r.set("source_count", json!(a.to_string()));
                r.set("reduced_count", json!(b.to_string()));
            }
            Ok(r.finish())
        }
        Command::BuildHardInstance { input, t, allow_plain_comp } => {
            let src = load_comp(input)?;
            let t = NumText::Text(t.clone()).integer()?;
            let hi = if *allow_plain_comp {
                build_hard_instance_unchecked(&src, &t)?
            } else {
                build_hard_instance(&CompStarInstance::new(src)?, &t)?
            };
            let mut r = Report::new("build-hard-instance", digits);
            r.set("hard_instance", serde_json::to_value(HardInstanceFile::of_instance(&hi)?).unwrap());
            Ok(r.finish())
        }
        Command::CompareSolutions { instance, emit_menus } => {
            let hi = load_hard(instance)?;
            let sp = build_solutions(&hi, &lim)?;
            let verdict = decide_winner(&sp, &hi.t);
            let mut r = Report::new("compare-solutions", digits);
            r.rational("rev1", &sp.rev1);
            r.rational("rev2", &sp.rev2);
            r.rational("a_prime", &sp.a_prime);
            r.rational("rev_b_term", &sp.rev_b_term);
            r.rational("c_prime", &sp.c_prime);
            r.rational("residual", &verdict.residual);
            r.set("residual_within_bound", json!(verdict.residual_within_bound));
            r.set("t", serde_json::to_value(NumText::of_integer(&hi.t)).unwrap());
            r.set("t_star", json!(sp.t_star.to_string()));
            r.set("yes_instance", json!(count_reaches(sp.t_star, &hi.t)));
            r.set("conditions_hold", json!(hi.conditions_hold));
            let (winner, menu, revenue) = match verdict.winner {
                Winner::Solution1 => ("solution1", &sp.sol1_menu, &sp.rev1),
                Winner::Solution2 => ("solution2", &sp.sol2_menu, &sp.rev2),
                Winner::Tie => ("tie", &sp.sol1_menu, &sp.rev1),
            };
            r.set("winner", json!(winner));
            r.rational("revenue", revenue);
            r.set("menu", menu_value(menu));
            if 1usize << (hi.n + 1) <= DIRECT_CHECK_GRID {
                let d = hi.distribution()?;
                let direct1 = expected_revenue(&sp.sol1_menu, &d, &lim)?;
                let direct2 = expected_revenue(&sp.sol2_menu, &d, &lim)?;
                if direct1 != sp.rev1 || direct2 != sp.rev2 {
                    return Err(Error::Consistency("closed-form revenues differ from direct evaluation".into()).into());
                }
                r.set("direct_evaluation", json!("matches"));
            }
            if *emit_menus {
                r.set("sol1_menu", menu_value(&sp.sol1_menu));
                r.set("sol2_menu", menu_value(&sp.sol2_menu));
            }
            Ok(r.finish())
        }
        Command::Verify { instance, menu } => {
            let d = load_instance(instance)?;
            let mut r = Report::new("verify", digits);
            r.set("valid", json!(true));
            r.set("items", json!(d.num_items()));
            r.set("support_sizes", json!(d.items().iter().map(|i| i.len()).collect::<Vec<_>>()));
            r.set("grid_size", d.grid_size().map_or(Value::Null, |g| json!(g)));
            if let Some(path) = menu {
                let m = load_menu(path)?;
                m.check_items(d.num_items())?;
                r.set("menu_entries", json!(m.len()));
            }
            Ok(r.finish())
        }
    }
}

/// Whether `count ≥ t`; a `t` beyond `u128` is never reached.
fn count_reaches(count: u128, t: &impl std::fmt::Display) -> bool {
    t.to_string().parse::<u128>().is_ok_and(|t| count >= t)
}
