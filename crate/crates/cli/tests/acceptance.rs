//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use adiagrover::evolver::{
    decompose_sectors, propagate_full, propagate_sectors, spin1_zero_x, wrap_phase, AncillaModel,
};
use adiagrover::grover::{estimate_overlap, optimal_iterations, GroverBackends};
use adiagrover::hamiltonians::{aklt_hamiltonian, ising_hf, IsingSpec, ScheduledHamiltonian};
use adiagrover::operators::{infidelity, HermitianOperator, StateVector};
use adiagrover::protocols::{
    default_anneal, ideal_oracle, marked_state, protocol1_ancilla, CompiledOracle, OracleVariant,
    RngStream, Sign,
};
use adiagrover::schedule::{AnnealSpec, ScheduleKind};
use adiagrover::C64;
use adiagrover_cli::commands::{oracle_infidelity, sector_phase};
use adiagrover_cli::{run_from, Settings};
use nalgebra::DVector;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_state(dims: Vec<usize>, rng: &mut RngStream) -> StateVector {
    let dim: usize = dims.iter().product();
    let v = DVector::from_fn(dim, |_, _| C64::new(rng.uniform() - 0.5, rng.uniform() - 0.5));
    StateVector::normalized(v, dims).unwrap()
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    for (model, n) in [("ising", "2"), ("aklt", "3")] {
        let settings = Settings::from_pairs(&[("model", model), ("n", n)]);
        let sweep = oracle_infidelity::sweep(&settings).map_err(|e| e.to_string())?;
        for fits in &sweep.report.fits {
            let exp = fits.exponential.as_ref().ok_or("missing exponential fit")?;
            let pow = fits.powerlaw.as_ref().ok_or("missing power-law fit")?;
            let times: Vec<f64> = sweep
                .records
                .iter()
                .filter(|r| r.parameters["schedule"] == fits.schedule)
                .filter(|r| matches!(r.parameters["status"].as_str(), "ok" | "breakdown"))
                .map(|r| r.metrics["total_time"])
                .collect();
            let span = (times.iter().cloned().fold(0.0, f64::max) / times.iter().cloned().fold(f64::MAX, f64::min)).log10();
            check(span >= 1.5, || format!("{model} {}: fitted grid spans {span:.3} decades", fits.schedule))?;
            let margin = match fits.schedule.as_str() {
                "tanh" => exp.r_squared - pow.r_squared,
                _ => pow.r_squared - exp.r_squared,
            };
            check(margin >= 0.05, || {
                format!("{model} {}: r2 exp {:.4} vs pow {:.4}", fits.schedule, exp.r_squared, pow.r_squared)
            })?;
            notes.push(format!(
                "{model}/{} exp {:.4} pow {:.4} ({span:.2} dec)",
                fits.schedule, exp.r_squared, pow.r_squared
            ));
        }
    }
    Ok(notes.join("; "))
}

fn criterion_2() -> Outcome {
    let settings = Settings::from_pairs(&[("energies", "0.5,1,2"), ("schedule", "tanh,linear")]);
    let report = sector_phase::report(&settings).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut worst_spread: f64 = 0.0;
    for e in [0.5, 1.0, 2.0] {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.energy == e).collect();
        check(rows.len() == 2, || format!("E={e}: expected two schedules"))?;
        let mut diffs = Vec::new();
        for r in rows {
            check(r.total_time >= 50.0 / e, || format!("E={e}: T={} below 50/|E|", r.total_time))?;
            let dev = r.deviation_from_pi.ok_or_else(|| format!("E={e} {}: breakdown", r.schedule))?;
            check(dev < 1e-3, || format!("E={e} {}: deviation {dev:e}", r.schedule))?;
            worst = worst.max(dev);
            diffs.push(r.difference.unwrap());
        }
        let spread = wrap_phase(diffs[0] - diffs[1]).abs();
        check(spread < 1e-2, || format!("E={e}: schedules differ by {spread:e}"))?;
        worst_spread = worst_spread.max(spread);
    }
    let _ = PI;
    Ok(format!("max |diff - pi| = {worst:.2e}; max schedule spread = {worst_spread:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut rng = RngStream::new(2024);
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let model = if case % 2 == 0 { AncillaModel::Spin1 } else { AncillaModel::QubitPair };
        let max_qubits = if model == AncillaModel::Spin1 { 4 } else { 4 };
        let n = 1 + (rng.uniform() * max_qubits as f64) as usize;
        let dim = 1 << n;
        let diag: Vec<f64> = (0..dim)
            .map(|_| {
                let mag = 0.2 + 2.0 * rng.uniform();
                if rng.uniform() < 0.5 {
                    -mag
                } else {
                    mag
                }
            })
            .collect();
        let hf = HermitianOperator::from_real_diagonal(&diag, vec![2; n]).unwrap();
        let phi = random_state(vec![2; n], &mut rng);
        let kind = if rng.uniform() < 0.5 { ScheduleKind::Tanh } else { ScheduleKind::Linear };
        let t = 0.5 + 9.5 * rng.uniform();
        let steps = 200 + (rng.uniform() * 600.0) as usize;
        let spec = AnnealSpec::new(kind, t, steps).unwrap();
        let (sh, ancilla) = match model {
            AncillaModel::Spin1 => (ScheduledHamiltonian::spin1_oracle(&hf), spin1_zero_x()),
            _ => (ScheduledHamiltonian::two_qubit_oracle(&hf), protocol1_ancilla()),
        };
        check(sh.dim() <= 64, || format!("case {case}: dim {}", sh.dim()))?;
        let full = propagate_full(|a, b| sh.at(a, b), &spec, &phi.kron(&ancilla)).map_err(|e| e.to_string())?;
        let sectors = decompose_sectors(&hf, &phi).map_err(|e| e.to_string())?;
        let sec = propagate_sectors(&sectors, model, &spec, &ancilla).map_err(|e| e.to_string())?;
        let err = infidelity(&full.final_state, &sec.final_state).unwrap();
        check(err < 1e-9, || format!("case {case} ({model:?}, n={n}, {kind}, T={t:.2}): 1-F = {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("20 cases, max 1-F = {worst:.2e}"))
}

/// Infidelities of spin-1, both applied Protocol 1 branches and Protocol 2,
/// measured even below the breakdown threshold.
fn oracle_errors(hf: &HermitianOperator, phi: &StateVector, t: f64) -> Result<[f64; 4], String> {
    let ideal = ideal_oracle(hf, phi).map_err(|e| e.to_string())?;
    let compile = |v: OracleVariant| {
        let spec = default_anneal(ScheduleKind::Tanh, t, hf, v).unwrap();
        CompiledOracle::compile(hf, v, &spec).map_err(|e| e.to_string())
    };
    let spin1 = compile(OracleVariant::Spin1)?.diagnose(hf, phi).map_err(|e| e.to_string())?;
    let p1 = compile(OracleVariant::Protocol1)?;
    let (pp, _) = p1.protocol1_branch(phi, (Sign::Plus, Sign::Plus)).map_err(|e| e.to_string())?;
    let (mm, _) = p1.protocol1_branch(phi, (Sign::Minus, Sign::Minus)).map_err(|e| e.to_string())?;
    let p2 = compile(OracleVariant::Protocol2)?.diagnose(hf, phi).map_err(|e| e.to_string())?;
    let inf = |s: &StateVector| infidelity(s, &ideal).unwrap();
    Ok([spin1.infidelity, inf(&pp), inf(&mm), p2.infidelity])
}

fn criterion_4() -> Outcome {
    let names = ["spin1", "p1(++)", "p1(--)", "p2"];
    let ladder: Vec<f64> = (0..5).map(|k| 30.0 / f64::from(1 << (4 - k))).collect();
    let mut rng = RngStream::new(7);
    let mut summary = Vec::new();
    for n in [2usize, 3] {
        let hf = ising_hf(&IsingSpec::uniform(n, 1.0).unwrap());
        for (label, phi) in [("s", StateVector::uniform(n)), ("random", random_state(vec![2; n], &mut rng))] {
            let errs: Vec<[f64; 4]> = ladder.iter().map(|&t| oracle_errors(&hf, &phi, t)).collect::<Result<_, _>>()?;
            let at30 = errs.last().unwrap();
            for (k, name) in names.iter().enumerate() {
                check(at30[k] < 1e-3, || format!("n={n} {label} {name}: infidelity {:e} at T=30", at30[k]))?;
                for w in 0..ladder.len() - 1 {
                    check(errs[w + 1][k] < errs[w][k], || {
                        let series: Vec<String> = errs.iter().map(|e| format!("{:.2e}", e[k])).collect();
                        format!(
                            "n={n} {label} {name}: not decreasing at T {} -> {}; series {}",
                            ladder[w],
                            ladder[w + 1],
                            series.join(" ")
                        )
                    })?;
                }
            }
            summary.push(format!("n={n}/{label} T=30 max {:.1e}", at30.iter().cloned().fold(0.0, f64::max)));
        }
    }
    Ok(format!("ladder T={ladder:?}; {}", summary.join(", ")))
}

fn criterion_5() -> Outcome {
    let hf = ising_hf(&IsingSpec::uniform(2, 1.0).unwrap());
    let phi = StateVector::uniform(2);
    let spec = default_anneal(ScheduleKind::Tanh, 30.0, &hf, OracleVariant::Protocol1).unwrap();
    let oracle = CompiledOracle::compile(&hf, OracleVariant::Protocol1, &spec).map_err(|e| e.to_string())?;
    let budget = 1e-3;
    let calls = 2000u64;
    let mut successes = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..calls {
        let out = oracle.apply(&phi, &mut RngStream::new(seed)).map_err(|e| e.to_string())?;
        if out.applied {
            successes += 1;
        } else {
            worst = worst.max(infidelity(&out.register_state, &phi).unwrap());
        }
    }
    let rate = successes as f64 / calls as f64;
    check((rate - 0.5).abs() <= 0.034, || format!("success rate {rate}"))?;
    check(worst < budget, || format!("failed-call infidelity {worst:e}"))?;
    Ok(format!("success rate {rate:.4} over {calls}; failed-call max infidelity {worst:.1e}"))
}

fn criterion_6() -> Outcome {
    let ideal_final = |n: usize, iterations: usize| -> Result<f64, String> {
        let spec = IsingSpec::uniform(n, 1.0).unwrap();
        let anneal = AnnealSpec::tanh(1.0, 100).unwrap();
        let b = GroverBackends::ising(&spec, &anneal, OracleVariant::Ideal, OracleVariant::Ideal).map_err(|e| e.to_string())?;
        Ok(b.run(iterations, &mut RngStream::new(0)).map_err(|e| e.to_string())?.final_fidelity())
    };
    let expected = (7.0 * 0.25f64.asin()).sin().powi(2);
    check(optimal_iterations(4) == 3, || "optimal iterations for N=16".into())?;
    let f16 = ideal_final(4, 3)?;
    check((f16 - expected).abs() < 1e-12, || format!("N=16 ideal {f16} vs {expected}"))?;
    let f4 = ideal_final(2, 1)?;
    check((f4 - 1.0).abs() < 1e-12, || format!("N=4 ideal {f4}"))?;

    let spec = IsingSpec::uniform(4, 1.0).unwrap();
    let hf = ising_hf(&spec);
    let anneal = default_anneal(ScheduleKind::Tanh, 20.0, &hf, OracleVariant::Protocol1).unwrap();
    let b = GroverBackends::ising(&spec, &anneal, OracleVariant::Protocol1, OracleVariant::Spin1).map_err(|e| e.to_string())?;
    let s = StateVector::uniform(4);
    let call_err = b.oracle.diagnose(&hf, &s).map_err(|e| e.to_string())?.infidelity.max(
        b.diffusion
            .diagnose(&adiagrover::hamiltonians::diffusion_hamiltonian(&spec), &s)
            .map_err(|e| e.to_string())?
            .infidelity,
    );
    check(call_err <= 1e-3, || format!("per-call infidelity {call_err:e}"))?;
    let mut lowest: f64 = 1.0;
    for seed in 0..3 {
        let run = b.run(3, &mut RngStream::new(seed)).map_err(|e| e.to_string())?;
        lowest = lowest.min(run.final_fidelity());
    }
    check(lowest >= 0.95, || format!("annealed fidelity {lowest}"))?;
    Ok(format!(
        "N=16 ideal {f16:.12} (ref {expected:.12}); N=4 ideal {f4:.12}; annealed min {lowest:.4} at per-call {call_err:.1e}"
    ))
}

fn criterion_7() -> Outcome {
    let hf = ising_hf(&IsingSpec::uniform(4, 1.0).unwrap());
    let oracle = CompiledOracle::ideal(&hf).map_err(|e| e.to_string())?;
    let uniform = estimate_overlap(&oracle, &StateVector::uniform(4), 24, &mut RngStream::new(0), None)
        .map_err(|e| e.to_string())?;
    let period = PI / (2.0 * 0.25f64.asin());
    let rel_p = (uniform.period_hat - period).abs() / period;
    let rel_g = (uniform.gamma_hat - 0.25).abs() / 0.25;
    check(rel_p < 0.02, || format!("period {} vs {period}", uniform.period_hat))?;
    check(rel_g < 0.02, || format!("gamma {}", uniform.gamma_hat))?;
    let target = marked_state(&hf).unwrap();
    let mut worst: f64 = 0.0;
    let mut rng = RngStream::new(99);
    for _ in 0..5 {
        let start = random_state(vec![2; 4], &mut rng);
        let direct = target.inner(&start).unwrap().norm();
        let iterations = (3.0 * PI / (2.0 * direct.asin())).ceil() as usize;
        let est = estimate_overlap(&oracle, &start, iterations.max(12), &mut RngStream::new(0), None)
            .map_err(|e| e.to_string())?;
        let rel = (est.gamma_hat - direct).abs() / direct;
        check(rel < 0.05, || format!("random start: gamma_hat {} vs {direct}", est.gamma_hat))?;
        worst = worst.max(rel);
    }
    Ok(format!("uniform: period err {rel_p:.1e}, gamma err {rel_g:.1e}; random: max rel err {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let h = aklt_hamiltonian(3).map_err(|e| e.to_string())?;
    let spectrum = h.eigh();
    let (l0, l1) = (spectrum.values[0], spectrum.values[1]);
    check(l0.abs() < 1e-9, || format!("lambda_min {l0:e}"))?;
    check(l1 > 1e-6, || format!("gap {l1:e}"))?;
    Ok(format!("lambda_min {l0:.1e}, gap {l1:.6}"))
}

fn criterion_9() -> Outcome {
    let run = |args: &[&str]| -> Result<Vec<u8>, String> {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["adiagrover"];
        argv.extend_from_slice(args);
        run_from(argv, &mut out, &mut err).map_err(|e| e.to_string())?;
        Ok(out)
    };
    let grover = ["grover-run", "--n", "3", "--seeds", "0..6", "--total-time", "8"];
    let sweep = ["oracle-infidelity", "--model", "ising", "--total-time", "1:10:4", "--fit-out", "/dev/null"];
    for args in [&grover[..], &sweep[..]] {
        let with = |threads: &str| {
            let mut a = args.to_vec();
            a.extend_from_slice(&["--threads", threads]);
            run(&a)
        };
        let first = with("4")?;
        let second = with("4")?;
        let serial = with("1")?;
        check(first == second, || format!("{}: two runs differ", args[0]))?;
        check(first == serial, || format!("{}: threads 4 vs 1 differ", args[0]))?;
        check(first.starts_with(b"# adiagrover-csv v1\n"), || format!("{}: header", args[0]))?;
    }
    Ok("grover-run and oracle-infidelity byte-identical across repeats and thread counts".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("schedule-shape separation", criterion_1, Duration::from_secs(120)),
        ("topological phase", criterion_2, Duration::from_secs(60)),
        ("sector/full equivalence", criterion_3, Duration::from_secs(60)),
        ("oracle correctness", criterion_4, Duration::from_secs(60)),
        ("protocol 1 statistics", criterion_5, Duration::from_secs(120)),
        ("grover endpoint", criterion_6, Duration::from_secs(180)),
        ("overlap estimation", criterion_7, Duration::from_secs(60)),
        ("AKLT ground truth", criterion_8, Duration::from_secs(60)),
        ("determinism", criterion_9, Duration::from_secs(60)),
    ];
    let mut failures = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(msg) if elapsed > *budget => Err(format!("{msg}; runtime {elapsed:.1?} over {budget:?}")),
            other => other,
        };
        match result {
            Ok(msg) => println!("criterion {}: PASS {name} ({elapsed:.1?}): {msg}", i + 1),
            Err(msg) => {
                failures += 1;
                println!("criterion {}: FAIL {name} ({elapsed:.1?}): {msg}", i + 1);
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
