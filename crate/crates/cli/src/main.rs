mod args;
mod config;
mod parse;
mod run;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use cmebound::model::{parse_template, NetworkTemplate, ReactionNetwork};
use cmebound::{Error, Rational};
use serde_json::{json, Value};

use args::{Cli, Command};
use run::Run;

fn main() -> ExitCode {
    let raw: Vec<std::ffi::OsString> = std::env::args_os().collect();
    let argv = match config::merge_config(raw.clone()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    // Clap exits with 2 on usage errors and 0 for --help.
    let cli = Cli::parse_from(argv.clone());
    match execute(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn overrides(params: &[String]) -> Result<Vec<(String, Rational)>, Error> {
    let mut out: Vec<(String, Rational)> = Vec::new();
    for p in params {
        let (k, v) = p.split_once('=').ok_or_else(|| Error::Config(format!("parameter `{p}` is not name=value")))?;
        let v = parse::rational(v)?;
        out.retain(|(name, _)| name != k.trim());
        out.push((k.trim().to_string(), v));
    }
    Ok(out)
}

fn check_params(t: &NetworkTemplate, given: &[(String, Rational)]) -> Result<(), Error> {
    let known = t.param_names();
    for (k, _) in given {
        if !known.contains(&k.as_str()) {
            return Err(Error::Config(format!("network has no parameter `{k}` (known: {})", known.join(", "))));
        }
    }
    Ok(())
}

fn execute(cli: &Cli, argv: &[std::ffi::OsString]) -> Result<(), Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Config(e.to_string()))?;
    }
    let m = cli.cmd.model();
    let text = std::fs::read_to_string(&m.network).map_err(|e| Error::Config(format!("cannot read {}: {e}", m.network.display())))?;
    let template = parse_template(&text)?;
    let base = overrides(&m.params)?;
    check_params(&template, &base)?;

    let Some(sweep) = &m.sweep else {
        let net = template.instantiate(&base)?;
        return run_one(cli, argv, &cli.out, &net, &base, &text);
    };
    let (name, values) = sweep.split_once('=').ok_or_else(|| Error::Config(format!("sweep `{sweep}` is not name=v1,v2,...")))?;
    let name = name.trim();
    check_params(&template, &[(name.to_string(), Rational::from_integer(0.into()))])?;
    let mut runs = Vec::new();
    let mut first_err = None;
    for v in values.split(',') {
        let mut ov = base.clone();
        ov.retain(|(k, _)| k != name);
        ov.push((name.to_string(), parse::rational(v)?));
        let net = template.instantiate(&ov)?;
        let sub = format!("sweep/{name}={}", v.trim());
        let res = run_one(cli, argv, &cli.out.join(&sub), &net, &ov, &text);
        runs.push(json!({ "value": v.trim(), "dir": sub, "ok": res.is_ok(), "error": res.as_ref().err().map(|e| e.to_string()) }));
        if let Err(e) = res {
            eprintln!("error in sweep run {sub}: {e}");
            first_err.get_or_insert(e);
        }
    }
    let mut top = Run::new(&cli.out)?;
    let mut man = manifest_base(cli, argv, &text);
    man["sweep"] = json!({ "parameter": name, "runs": runs });
    top.write_json("manifest.json", &man)?;
    first_err.map_or(Ok(()), Err)
}

fn manifest_base(cli: &Cli, argv: &[std::ffi::OsString], network_text: &str) -> Value {
    let env: serde_json::Map<String, Value> = std::env::vars().filter(|(k, _)| k.starts_with("CMEBOUND_")).map(|(k, v)| (k, json!(v))).collect();
    json!({
        "tool": "cmebound",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": cli.cmd.name(),
        "argv": argv.iter().map(|a| a.to_string_lossy().to_string()).collect::<Vec<_>>(),
        "options": cli,
        "environment": env,
        "threads": rayon::current_num_threads(),
        "network_source": network_text,
    })
}

fn run_one(
    cli: &Cli,
    argv: &[std::ffi::OsString],
    dir: &Path,
    net: &ReactionNetwork,
    params: &[(String, Rational)],
    text: &str,
) -> Result<(), Error> {
    let mut r = Run::new(dir)?;
    let res = match &cli.cmd {
        Command::Moments(a) => run::moments(&mut r, net, a),
        Command::Dist(a) => run::dist(&mut r, net, a),
        Command::Marginal(a) => run::marginal(&mut r, net, a),
        Command::Simulate(a) => run::simulate(&mut r, net, a),
        Command::Drift(a) => run::drift(&mut r, net, a),
        Command::Export(a) => run::export(&mut r, net, a),
    };
    let mut man = manifest_base(cli, argv, text);
    man["network_digest"] = json!(net.digest());
    man["network"] = cmebound::model::network_to_json(net);
    man["parameters"] = json!(params.iter().map(|(k, v)| (k.clone(), json!(v.to_string()))).collect::<serde_json::Map<String, Value>>());
    man["outputs"] = json!(r.files);
    man["warnings"] = json!(r.warnings);
    man["results"] = Value::Object(r.results.clone());
    man["status"] = match &res {
        Ok(()) => json!("ok"),
        Err(e) => json!({ "error": e.to_string(), "exit_code": e.exit_code() }),
    };
    r.write_json("manifest.json", &man)?;
    res
}
