use clap::{Parser, Subcommand, ValueEnum};
use gfc::contractions::Setup;
use gfc::fedosov;
use gfc::graded::Elem;
use gfc::hpl::check_contraction;
use gfc::model::{load_model, reference, validate, Fam, Model, Orders, Space};
use gfc::poly::Kind;
use gfc::suites::{Config, Session, SUITES};
use serde_json::json;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "gfc", version, about = "Exact Fedosov constructions and identity suites for graded local models")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a model file: degrees, torsion, [Q,Q] = 0.
    Validate {
        /// model file, or the name of a reference model
        model: String,
        #[arg(long)]
        json: bool,
    },
    /// Build A and the Fedosov differential D.
    Fedosov {
        model: String,
        /// y-order (defaults to the model's y_order)
        #[arg(long)]
        order: Option<u32>,
        /// cross-check D against the pbw construction
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run identity suites.
    Verify {
        model: String,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, env = "GFC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        json: bool,
    },
    /// Apply τ̆ to a base chain and check the contraction relations on it.
    Contract {
        model: String,
        #[arg(long, value_enum)]
        level: Level,
        /// the base chain, in the generator syntax of the model
        chain: String,
        /// use the dg contraction (needs Q)
        #[arg(long)]
        dg: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Vector,
    Covector,
    Endo,
    Tpoly,
    Apoly,
    Dpoly,
    Cpoly,
}

impl Level {
    fn kind(self) -> Kind {
        match self {
            Level::Vector => Kind::Tensor(1, 0),
            Level::Covector => Kind::Tensor(0, 1),
            Level::Endo => Kind::Tensor(1, 1),
            Level::Tpoly => Kind::T,
            Level::Apoly => Kind::A,
            Level::Dpoly => Kind::D,
            Level::Cpoly => Kind::C,
        }
    }
}

fn load(arg: &str) -> Result<Model, String> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some((_, m)) = reference::all().into_iter().find(|(n, _)| *n == arg) {
            return Ok(m);
        }
        return Err(format!("{arg}: no such file or reference model"));
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{arg}: {e}"))?;
    let spec = load_model(&text).map_err(|e| format!("{arg}: {e}"))?;
    let mut m = validate(spec).map_err(|e| format!("{arg}: {e}"))?;
    m.name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(m)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Validate { model, json } => cmd_validate(&model, json),
        Cmd::Fedosov {
            model,
            order,
            oracle,
            json,
        } => cmd_fedosov(&model, order, oracle, json),
        Cmd::Verify {
            model,
            suite,
            seed,
            samples,
            jobs,
            json,
        } => cmd_verify(&model, &suite, Config { seed, samples, jobs }, json),
        Cmd::Contract {
            model,
            level,
            chain,
            dg,
            json,
        } => cmd_contract(&model, level.kind(), &chain, dg, json),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn cmd_validate(arg: &str, json: bool) -> Result<bool, String> {
    match load(arg) {
        Ok(m) => {
            if json {
                print_json(&json!({"model": m.name, "model_hash": m.hash(), "valid": true, "dim": m.dim(), "q": m.has_q()}));
            } else {
                println!("valid: {} ({} coordinates, hash {})", m.name, m.dim(), m.hash());
            }
            Ok(true)
        }
        Err(e) => {
            if json {
                print_json(&json!({"model": arg, "valid": false, "error": e}));
            } else {
                println!("invalid: {e}");
            }
            Ok(false)
        }
    }
}

fn cmd_fedosov(arg: &str, order: Option<u32>, oracle: bool, json: bool) -> Result<bool, String> {
    let m = load(arg)?;
    let n = order.unwrap_or(m.orders().y_order);
    let m = m.with_orders(Orders { y_order: n, ..m.orders() });
    let sp = Space::new(&m, n, 1);
    let fd = fedosov::build(&sp).map_err(|e| e.to_string())?;
    let ys = sp.fam(Fam::Y).to_vec();
    let gens: Vec<usize> = [Fam::X, Fam::Xi, Fam::Y].iter().flat_map(|&f| sp.fam(f).to_vec()).collect();
    let name = |g: usize| sp.ctx.gen(g).name.clone();
    let a: Vec<(String, String)> = ys.iter().map(|&g| (name(g), fd.a.on_gen(g).to_string())).collect();
    let d: Vec<(String, String)> = gens.iter().map(|&g| (name(g), fd.d.on_gen(g).to_string())).collect();
    let sq = fd.d.commutator(&fd.d);
    let residual = Elem::zero(&sp.ctx);
    let residual = gens.iter().fold(residual, |acc, &g| acc.add(&sq.on_gen(g)));
    let oracle_res = oracle.then(|| fedosov::check_pbw_oracle(&fd));
    let ok = residual.is_zero() && !matches!(oracle_res, Some(Err(_)));
    if json {
        print_json(&json!({
            "model": m.name,
            "model_hash": m.hash(),
            "order": n,
            "A": a.iter().cloned().collect::<std::collections::BTreeMap<_, _>>(),
            "D": d.iter().cloned().collect::<std::collections::BTreeMap<_, _>>(),
            "D_squared": residual.to_string(),
            "oracle": oracle_res.as_ref().map(|r| match r {
                Ok(()) => "agree".to_string(),
                Err(e) => e.to_string(),
            }),
        }));
    } else {
        println!("model {} (hash {}), y-order {n}", m.name, m.hash());
        for (g, e) in &a {
            println!("A({g}) = {e}");
        }
        for (g, e) in &d {
            println!("D({g}) = {e}");
        }
        println!("D² residual: {residual}");
        match &oracle_res {
            Some(Ok(())) => println!("pbw oracle: agree"),
            Some(Err(e)) => println!("pbw oracle: {e}"),
            None => {}
        }
    }
    Ok(ok)
}

fn cmd_verify(arg: &str, suite: &str, cfg: Config, json: bool) -> Result<bool, String> {
    let m = load(arg)?;
    if !SUITES.contains(&suite) {
        return Err(format!("unknown suite `{suite}` (one of {})", SUITES.join(", ")));
    }
    let session = Session::new(&m, cfg);
    let names: Vec<&str> = if suite == "all" { SUITES[..SUITES.len() - 1].to_vec() } else { vec![suite] };
    let mut reports = Vec::new();
    for name in names {
        let t = Instant::now();
        let r = session.run_one(name).map_err(|e| e.to_string())?;
        if !json {
            let status = match (&r.skipped, r.passed) {
                (Some(_), _) => "skip",
                (None, true) => "pass",
                (None, false) => "FAIL",
            };
            println!("{status} {:<20} {:>6} checks  {:.2}s", r.suite, r.checked, t.elapsed().as_secs_f64());
            if let Some(why) = &r.skipped {
                println!("    {why}");
            }
            for (id, tally) in r.identities.iter().filter(|(_, t)| t.failed > 0) {
                println!("    {id}: {}/{} failed", tally.failed, tally.checked);
            }
            for w in &r.failures {
                println!("    witness [{}] input {} residual {}", w.identity, w.input, w.residual);
            }
        }
        reports.push(r);
    }
    let ok = reports.iter().all(|r| r.passed);
    if json {
        print_json(&json!({
            "model": m.name,
            "model_hash": m.hash(),
            "seed": cfg.seed,
            "samples": cfg.samples,
            "passed": ok,
            "reports": reports,
        }));
    }
    Ok(ok)
}

fn cmd_contract(arg: &str, level: Kind, chain: &str, dg: bool, json: bool) -> Result<bool, String> {
    let m = load(arg)?;
    let o = m.orders();
    let s = Setup::new(&m, o.y_order, (2 * o.max_arity).max(3)).map_err(|e| e.to_string())?;
    let x = Elem::parse(&s.sp.ctx, chain).map_err(|e| e.to_string())?;
    let parts: Vec<Elem> = x.by_degree().into_values().collect();
    let c = if dg { s.dg(level, &parts, &[]) } else { s.fedosov(level, &parts) }.map_err(|e| e.to_string())?;
    let tx = (c.maps.tau)(&x);
    let taus: Vec<Elem> = parts.iter().map(|p| (c.maps.tau)(p)).collect();
    let failures = check_contraction(&c.maps, &parts, &taus);
    let ok = failures.is_empty();
    if json {
        print_json(&json!({
            "model": m.name,
            "model_hash": m.hash(),
            "level": level.to_string(),
            "provenance": c.provenance,
            "input": x.to_string(),
            "tau": tx.to_string(),
            "failures": failures,
        }));
    } else {
        println!("τ̆({x}) = {tx}");
        println!("provenance: {}", c.provenance.join(" → "));
        for f in &failures {
            println!("FAIL {}: input {} residual {}", f.relation, f.input, f.residual);
        }
        if ok {
            println!("contraction relations hold on the input");
        }
    }
    Ok(ok)
}
