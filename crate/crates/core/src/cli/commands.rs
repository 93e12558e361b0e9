use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use super::profile::Profile;
use super::{tolerance, CliError, Command, Config, Outcome, Table};
use crate::coupling;
use crate::dynamics::{
    case_network, evolve_dissipative_ring, evolve_on, evolve_ring, evolve_unitary_full, line_network, ring_network,
    FullGraphState, GraphState, Grid,
};
use crate::graph::{self, GraphCase, GraphSpec};
use crate::halfline::{spectral_distribution, BoundaryCondition, HalfLineState, SpectralTails};
use crate::herglotz::{herglotz_eval, CharFn, Extended, HalfPlanePoint, HerglotzMeasure};
use crate::monitoring::{
    classify_state, default_ladder, estimate_decay_rate, predicted_tau, Classification, Jump, Scenario, CLASSIFY_LADDER,
};
use crate::stable::{empirical_cf, sample_stable, stable_cf, StableLawParams};

pub(super) fn dispatch(command: Command, cfg: &Config, seed: Option<u64>) -> Result<Outcome, CliError> {
    match command {
        Command::Spectral => spectral(cfg),
        Command::Measure => measure(cfg, seed),
        Command::Evolve => evolve(cfg),
        Command::Monitor => monitor(cfg),
        Command::Zeno => zeno(cfg),
        Command::Couple => couple(cfg),
        Command::Stable => stable(cfg, seed),
        Command::Selftest => Err(CliError::Config("selftest takes no config".into())),
    }
}

fn summary(pairs: Value) -> Map<String, Value> {
    match pairs {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Option<String> {
    if ok {
        None
    } else {
        Some(msg())
    }
}

fn graph_spec(cfg: &Config) -> Result<GraphSpec, CliError> {
    let s = "graph";
    let case: GraphCase = cfg.parse(s, "case")?.ok_or_else(|| CliError::Config("graph.case: missing".into()))?;
    let mu = cfg.f64_or(s, "mu", 0.0)?;
    let nu = match case {
        GraphCase::IStar => cfg.req_f64(s, "nu")?,
        GraphCase::I => mu,
        GraphCase::II | GraphCase::III => mu + cfg.req_f64(s, "ell")?,
    };
    let k = match case {
        GraphCase::I | GraphCase::III => cfg.req_f64(s, "k")?,
        _ => 0.0,
    };
    let theta = match cfg.str(s, "theta")? {
        Some("inf") => Extended::Infinity,
        Some(other) => return Err(CliError::Config(format!("graph.theta: expected \"inf\" or use theta_arg, found `{other}`"))),
        None => Extended::Finite(Complex64::from_polar(1.0, cfg.f64_or(s, "theta_arg", 0.0)?)),
    };
    GraphSpec::new(case, mu, nu, k, theta).map_err(|e| CliError::Config(format!("graph: {e}")))
}

fn grid(cfg: &Config) -> Result<Grid, CliError> {
    let g = "grid";
    Grid::new(cfg.f64_or(g, "dx", 1.0 / 1024.0)?, cfg.f64_or(g, "c", 1.0)?, cfg.f64_or(g, "l_max", 8.0)?)
        .map_err(|e| CliError::Config(format!("grid: {e}")))
}

fn spectral(cfg: &Config) -> Result<Outcome, CliError> {
    let spec = graph_spec(cfg)?;
    let theta = spec.theta().map_err(|e| CliError::Config(format!("graph.theta: {e}")))?;
    let lo = cfg.f64_or("sweep", "lambda_min", -20.0)?;
    let hi = cfg.f64_or("sweep", "lambda_max", 20.0)?;
    let points = cfg.u64_or("sweep", "points", 401)?;
    if !(hi > lo) || points < 2 {
        return Err(CliError::Config("sweep: need lambda_max > lambda_min and points ≥ 2".into()));
    }
    let tol = tolerance(1e-10)?;
    let is_iii = spec.case == GraphCase::III;
    let mut table = Table::new(&["lambda", "abs_s", "arg_s", "abs_t"])
        .meta("table", "characteristic function on the real axis")
        .meta("formula", "S = e^{-2i alpha}{k; e^{i l z}; k e^{i l z}}, t = (Theta + k e^{i l z})/(e^{i l z} + k Theta)");
    let expected = ((theta + (-spec.ell()).exp() * spec.k) / (theta * (spec.k * (-spec.ell()).exp()) + 1.0)).norm();
    let mut dev: f64 = 0.0;
    for j in 0..points {
        let lam = lo + (hi - lo) * j as f64 / (points - 1) as f64;
        let s = graph::char_closed(&spec, Complex64::new(lam, 0.0))?;
        let t = if is_iii {
            let t = graph::transmission(spec.k, spec.ell(), theta, lam);
            let si = graph::char_interval(spec.k, spec.ell(), theta, Complex64::new(lam, 0.0));
            dev = dev.max(((t * si).norm() - expected).abs());
            t.norm().to_string()
        } else {
            String::new()
        };
        table.push([lam.to_string(), s.norm().to_string(), s.arg().to_string(), t]);
    }
    let kappa = graph::kappa_of(&spec)?;
    let at2i = Complex64::new(0.0, 2.0);
    let s2 = graph::char_closed(&spec, at2i)?;
    let l2 = graph::livsic_closed(&spec, at2i)?;
    let mut m = summary(json!({
        "case": format!("{:?}", spec.case),
        "kappa": [kappa.re, kappa.im],
        "char_at_2i": [s2.re, s2.im],
        "livsic_at_2i": [l2.re, l2.im],
        "tolerance": tol,
    }));
    if let Ok(w) = graph::weyl_closed(&spec, at2i) {
        m.insert("weyl_at_2i".into(), json!([w.re, w.im]));
    }
    let mut failure = None;
    if is_iii {
        m.insert("transmission_identity_deviation".into(), json!(dev));
        m.insert("transmission_identity_value".into(), json!(expected));
        failure = check(dev <= tol, || format!("|t S| deviates from its constant by {dev:e}"));
    }
    Ok(Outcome { table, summary: m, failure })
}

fn measure(cfg: &Config, seed: Option<u64>) -> Result<Outcome, CliError> {
    let spec = graph_spec(cfg)?;
    let mu = graph::spectral_measure(&spec)?;
    let count = cfg.u64_or("points", "count", 50)?;
    let seed = seed.unwrap_or(cfg.u64_or("points", "seed", 0)?);
    let tol = tolerance(1e-6)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Table::new(&["re_z", "im_z", "re_closed", "im_closed", "re_quadrature", "im_quadrature", "abs_err"])
        .meta("table", "Herglotz integral of the spectral measure against the closed Weyl function")
        .meta("formula", "M(z) = int (1/(l - z) - l/(1 + l^2)) dmu(l)")
        .meta("seed", seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let z = HalfPlanePoint::new(rng.random_range(-5.0..5.0), rng.random_range(0.1..3.0))?;
        let closed = graph::weyl_closed(&spec, z.z())?;
        let quad = herglotz_eval(&mu, z)?;
        let err = (closed - quad).norm() / closed.norm().max(1.0);
        worst = worst.max(err);
        table.push([z.re, z.im, closed.re, closed.im, quad.re, quad.im, err]);
    }
    let m = summary(json!({ "max_rel_error": worst, "points": count, "seed": seed, "tolerance": tol }));
    Ok(Outcome { table, summary: m, failure: check(worst <= tol, || format!("measure/closed-form mismatch {worst:e}")) })
}

fn evolve(cfg: &Config) -> Result<Outcome, CliError> {
    let g = grid(cfg)?;
    let kind = cfg.str("scenario", "kind")?.unwrap_or("contraction");
    let t = cfg.req_f64("scenario", "t")?;
    let tol = tolerance(1e-12)?;
    let ell = cfg.f64_or("scenario", "ell", 1.0)?;
    let (initial, last, unitary) = match kind {
        "contraction" => {
            let spec = graph_spec(cfg)?;
            let net = case_network(&spec, &g)?;
            let labels: Vec<&str> = net.edges.iter().map(|e| e.label.as_str()).collect();
            let p = Profile::from_config(cfg, &labels)?;
            let st = GraphState::from_fn(net.clone(), g, |l, x| p.eval_on(l, x));
            let out = crate::dynamics::evolve_contraction(&st, &spec, t)?;
            (st, out, false)
        }
        "full" => {
            let k = cfg.req_f64("scenario", "k")?;
            let mu = cfg.f64_or("scenario", "mu", 0.0)?;
            let p = Profile::from_config(cfg, &["up", "down"])?;
            let st = FullGraphState::from_fn(mu, &g, |x| p.eval_on("up", x), |x| p.eval_on("down", x))?;
            let out = evolve_unitary_full(&st, k, mu, t)?;
            (st.0, out.0, true)
        }
        "ring" => {
            let flux = cfg.f64_or("scenario", "flux", 0.0)?;
            let p = Profile::from_config(cfg, &["ring"])?;
            let st = GraphState::from_fn(ring_network(ell, Complex64::new(1.0, 0.0), &g)?, g, |l, x| p.eval_on(l, x));
            let out = evolve_ring(&st, flux, t)?;
            (st, out, true)
        }
        "dissipative_ring" => {
            let kappa = Complex64::new(cfg.f64_or("scenario", "kappa_re", 0.0)?, cfg.f64_or("scenario", "kappa_im", 0.0)?);
            let p = Profile::from_config(cfg, &["ring"])?;
            let st = GraphState::from_fn(ring_network(ell, kappa, &g)?, g, |l, x| p.eval_on(l, x));
            let out = evolve_dissipative_ring(&st, kappa, t)?;
            (st, out, false)
        }
        "line" => {
            let net = line_network(&g)?;
            let p = Profile::from_config(cfg, &["line"])?;
            let st = GraphState::from_fn(net.clone(), g, |l, x| p.eval_on(l, x));
            let out = evolve_on(&net, &st, t)?;
            (st, out, true)
        }
        other => return Err(CliError::Config(format!("scenario.kind: unknown evolution `{other}`"))),
    };
    let (n0, n1) = (initial.norm_sq(), last.norm_sq());
    let mut table = Table::from_csv(&last.to_csv())
        .meta("table", "evolved state samples")
        .meta("formula", "transport f(x) -> f(x - c t) with vertex scattering")
        .meta("t", t);
    table.meta.push(("kind".into(), kind.into()));
    let failure = if unitary {
        check((n1 - n0).abs() <= tol * n0.max(1.0), || format!("unitary evolution changed the norm by {:e}", n1 - n0))
    } else {
        check(n1 <= n0 * (1.0 + tol), || format!("contraction increased the norm from {n0} to {n1}"))
    };
    let m = summary(json!({
        "kind": kind,
        "t": t,
        "norm_sq_initial": n0,
        "norm_sq_final": n1,
        "exact": last.exact,
        "tolerance": tol,
    }));
    Ok(Outcome { table, summary: m, failure })
}

fn jumps(cfg: &Config) -> Result<Vec<Jump>, CliError> {
    let Some(spec) = cfg.str("state", "jumps")? else {
        return Ok(vec![]);
    };
    spec.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (edge, x) = p
                .trim()
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("state.jumps: expected edge:x, found `{p}`")))?;
            let x = x.trim().parse().map_err(|e| CliError::Config(format!("state.jumps: `{x}`: {e}")))?;
            Ok(Jump { edge: edge.trim().into(), x })
        })
        .collect()
}

fn scenario(cfg: &Config) -> Result<Scenario, CliError> {
    let kind = cfg.req_str("scenario", "kind")?;
    let ell = cfg.f64_or("scenario", "ell", 1.0)?;
    let scn = match kind {
        "ring" => {
            let g = grid(cfg)?;
            let p = Profile::from_config(cfg, &["ring"])?;
            Scenario::ring(ell, cfg.f64_or("scenario", "flux", 0.0)?, &g, |x| p.eval(x))?
        }
        "dissipative_ring" => {
            let g = grid(cfg)?;
            let p = Profile::from_config(cfg, &["ring"])?;
            let kappa = Complex64::new(cfg.f64_or("scenario", "kappa_re", 0.0)?, cfg.f64_or("scenario", "kappa_im", 0.0)?);
            Scenario::dissipative_ring(ell, kappa, &g, |x| p.eval(x))?
        }
        "line" => {
            let g = grid(cfg)?;
            let p = Profile::from_config(cfg, &["line"])?;
            Scenario::line(&g, |x| p.eval(x))?
        }
        "graph" => {
            let g = grid(cfg)?;
            let p = Profile::from_config(cfg, &["left", "right", "ring", "appendix"])?;
            Scenario::graph(graph_spec(cfg)?, &g, |l, x| p.eval_on(l, x))?
        }
        "half_line" => {
            let p = Profile::from_config(cfg, &[])?;
            let h = cfg.f64_or("halfline", "h", 1e-3)?;
            let x_max = cfg.f64_or("halfline", "x_max", 40.0)?;
            let st = HalfLineState::from_fn(|x| p.eval(x), h, x_max)?;
            let bc = match cfg.str("halfline", "bc")?.unwrap_or("dirichlet") {
                "dirichlet" => BoundaryCondition::Dirichlet,
                "mixed" => BoundaryCondition::Mixed(cfg.req_f64("halfline", "gamma")?),
                other => return Err(CliError::Config(format!("halfline.bc: unknown boundary condition `{other}`"))),
            };
            Scenario::half_line(st, bc)
        }
        other => return Err(CliError::Config(format!("scenario.kind: unknown scenario `{other}`"))),
    };
    Ok(scn.with_jumps(jumps(cfg)?))
}

fn ladder(cfg: &Config) -> Result<Vec<u64>, CliError> {
    let lo = cfg.u64_or("monitor", "ladder_min_exp", 6)?;
    let hi = cfg.u64_or("monitor", "ladder_max_exp", 12)?;
    if hi > 40 || hi < lo + 3 {
        return Err(CliError::Config("monitor.ladder_max_exp: need at least 4 ladder points and exponents ≤ 40".into()));
    }
    Ok(if (lo, hi) == (6, 12) { default_ladder() } else { (lo..=hi).map(|p| 1u64 << p).collect() })
}

fn monitor(cfg: &Config) -> Result<Outcome, CliError> {
    let scn = scenario(cfg)?;
    let t = cfg.f64_or("monitor", "t", 1.0)?;
    let tol = tolerance(0.02)?;
    let r = estimate_decay_rate(&scn, t, &ladder(cfg)?)?;
    let table = Table::from_csv(&r.to_csv())
        .meta("table", "decay-rate estimates along the measurement ladder")
        .meta("formula", "tau_hat(n) = -(2/s) ln|a(s)|, s = t/n; tau = c * sum |jump|^2");
    let mut m = summary(r.summary_json());
    m.insert("tolerance".into(), json!(tol));
    m.insert("t".into(), json!(t));
    let failure = match r.relative_error() {
        Some(e) => check(e <= tol, || format!("relative decay-rate error {e:.4} exceeds {tol}")),
        None => Some("no predicted decay constant for this scenario".into()),
    };
    Ok(Outcome { table, summary: m, failure })
}

fn class_name(c: &Classification) -> &'static str {
    match c {
        Classification::Zeno => "zeno",
        Classification::AntiZeno => "anti_zeno",
        Classification::Resonant(_) => "resonant",
        Classification::Unknown(_) => "unknown",
    }
}

fn zeno(cfg: &Config) -> Result<Outcome, CliError> {
    let scn = scenario(cfg)?;
    let class = classify_state(&scn)?;
    let mut m = summary(json!({ "classification": class_name(&class) }));
    match &class {
        Classification::Resonant(tau) => {
            m.insert("tau".into(), json!(tau));
        }
        Classification::Unknown(why) => {
            m.insert("diagnostics".into(), json!(why));
        }
        _ => {}
    }
    let table = match &scn.evolution {
        crate::monitoring::Evolution::HalfLine(bc) => {
            let Some(p) = cfg.str("state", "profile")?.map(String::from) else {
                return Err(CliError::Config("state.profile: required for half-line scenarios".into()));
            };
            let prof = Profile::from_config(cfg, &[])?;
            let h = cfg.f64_or("halfline", "h", 1e-3)?;
            let st = HalfLineState::from_fn(|x| prof.eval(x), h, cfg.f64_or("halfline", "x_max", 40.0)?)?;
            let dist = spectral_distribution(&st, *bc)?;
            let mut t = Table::new(&["lambda", "g"])
                .meta("table", "tail growth used for classification")
                .meta("formula", "g(lambda) = lambda (1 - N(lambda) + N(-lambda))")
                .meta("profile", p);
            for &l in &CLASSIFY_LADDER {
                t.push([l, l * (dist.upper_tail(l)? + dist.lower_tail(l)?)]);
            }
            t
        }
        _ => {
            let tau = predicted_tau(&scn)?;
            m.insert("tau_predicted".into(), json!(tau));
            let mut t = Table::new(&["quantity", "value"])
                .meta("table", "boundary-data classification")
                .meta("formula", "tau = c * sum |jump|^2; zero iff the state satisfies the boundary condition");
            t.push(["tau_predicted".to_string(), tau.to_string()]);
            t
        }
    };
    let failure = match cfg.str("zeno", "expect")? {
        Some(e) if e != class_name(&class) => Some(format!("expected `{e}`, classified as `{}`", class_name(&class))),
        _ => None,
    };
    Ok(Outcome { table, summary: m, failure })
}

fn couple(cfg: &Config) -> Result<Outcome, CliError> {
    let s = "couple";
    let mode = cfg.str(s, "mode")?.unwrap_or("volterra");
    let atom = cfg.f64_or(s, "atom", 0.0)?;
    let weight = cfg.f64_or(s, "weight", 1.0)?;
    let t = cfg.f64_or(s, "t", 1.0)?;
    let z = Complex64::new(cfg.f64_or(s, "z_re", 0.0)?, cfg.f64_or(s, "z_im", 1.0)?);
    let lo = cfg.u64_or(s, "n_min_exp", 2)?;
    let hi = cfg.u64_or(s, "n_max_exp", 4)?;
    if hi < lo || hi > 9 {
        return Err(CliError::Config("couple.n_max_exp: need n_min_exp ≤ n_max_exp ≤ 9".into()));
    }
    if !(weight > 0.0 && t > 0.0) {
        return Err(CliError::Config("couple: weight and t must be positive".into()));
    }
    let tol = tolerance(0.02)?;
    let sfn = CharFn::RankOne { measure: HerglotzMeasure::discrete(vec![(atom, weight)])?, t };
    let ell = coupling::volterra_length(&sfn)?;
    let (limit, formula) = match mode {
        "volterra" => ((-crate::I * ell / z).exp(), "S(nz)^n -> exp(-i l / z), l = 2 t mass"),
        "weyl" => (coupling::volterra_weyl(ell, z), "M_n -> -(2/l) tan(l / (2z))"),
        "nfold" => {
            let e = coupling::nfold_exponent(&sfn, atom)?;
            (e.limit(z), "S(z/n + mu)^n -> e^{i l z}, l = d arg S / d lambda")
        }
        other => return Err(CliError::Config(format!("couple.mode: unknown mode `{other}`"))),
    };
    let mut table = Table::new(&["n", "abs_error"]).meta("table", "convergence of the coupling ladder").meta("formula", formula);
    let mut errs = Vec::new();
    for p in lo..=hi {
        let n = 10u64.pow(p as u32);
        let v = match mode {
            "volterra" => coupling::volterra_limit(&sfn, n, z)?,
            "weyl" => coupling::coupling_weyl_limit(&sfn, n, z)?,
            _ => coupling::nfold_limit(&sfn, atom, n, z)?,
        };
        let e = (v - limit).norm();
        errs.push(e);
        table.push([n as f64, e]);
    }
    let last = *errs.last().unwrap_or(&f64::NAN);
    let scale = limit.norm().max(1e-300);
    let m = summary(json!({
        "mode": mode,
        "limit": [limit.re, limit.im],
        "ell": ell,
        "final_abs_error": last,
        "tolerance": tol,
    }));
    Ok(Outcome { table, summary: m, failure: check(last <= tol * scale, || format!("ladder error {last:e} above tolerance")) })
}

fn stable(cfg: &Config, seed: Option<u64>) -> Result<Outcome, CliError> {
    let s = "stable";
    let p = StableLawParams::new(
        cfg.req_f64(s, "alpha")?,
        cfg.f64_or(s, "beta", 0.0)?,
        cfg.f64_or(s, "gamma", 0.0)?,
        cfg.f64_or(s, "sigma", 1.0)?,
    )
    .map_err(|e| CliError::Config(format!("stable: {e}")))?;
    let count = cfg.u64_or(s, "samples", 100_000)? as usize;
    if count == 0 {
        return Err(CliError::Config("stable.samples: must be positive".into()));
    }
    let seed = seed.unwrap_or(cfg.u64_or(s, "seed", 0)?);
    let ts = cfg.f64_list(s, "t_values")?.unwrap_or_else(|| vec![0.1, 0.25, 0.5, 1.0, 2.0]);
    let tol = tolerance(0.02)?;
    let xs = sample_stable(&p, count, seed);
    let mut table = Table::new(&["t", "re_empirical", "im_empirical", "re_cf", "im_cf", "abs_err"])
        .meta("table", "empirical against exact characteristic function")
        .meta("formula", "phi(t) = exp(sigma (i gamma t - |t|^alpha (1 - i beta sgn(t) omega(t, alpha))))")
        .meta("seed", seed);
    let mut worst: f64 = 0.0;
    for &t in &ts {
        let e = empirical_cf(&xs, t);
        let c = stable_cf(&p, t);
        let d = (e - c).norm();
        worst = worst.max(d);
        table.push([t, e.re, e.im, c.re, c.im, d]);
    }
    let m = summary(json!({
        "alpha": p.alpha, "beta": p.beta, "gamma": p.gamma, "sigma": p.sigma,
        "samples": count, "seed": seed, "max_abs_error": worst, "tolerance": tol,
    }));
    Ok(Outcome { table, summary: m, failure: check(worst <= tol, || format!("empirical CF deviates by {worst:e}")) })
}
