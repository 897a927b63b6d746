//! Acceptance criteria for the filtered moment method, one PASS/FAIL line
//! each. The long runs take tens of minutes on one core.
//!
//! FHME_ACCEPTANCE_STRICT=1   exit nonzero if any criterion fails
//! FHME_ACCEPTANCE_ONLY=a,b   run only criteria whose name contains a or b

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use filtered_hme::diagnostics::{estimate_frequency, find_peaks, fit_damping_rate, fit_line, thermal_momentum, PeakList};
use filtered_hme::filter::{apply_filter, validate_filter, FilterKind, FilterSpec};
use filtered_hme::moments::{raw_moments, MomentState};
use filtered_hme::multi_index::MultiIndexSet;
use filtered_hme::reference::{dvm_density, dvm_half_width, dvm_vlasov_run, exact_free_streaming_density, HermiteCollocation};
use filtered_hme::simulation::{initial_grid, run, Preset, RunRecord, SimConfig, TimeSeries};

const GAMMA: f64 = -0.0126;
const OMEGA: f64 = 1.1598;

struct Harness {
    only: Vec<String>,
    results: Vec<(String, bool)>,
    runs: BTreeMap<String, (SimConfig, RunRecord)>,
}

impl Harness {
    fn wants(&self, name: &str) -> bool {
        self.only.is_empty() || self.only.iter().any(|o| name.contains(o.as_str()))
    }

    fn report(&mut self, name: &str, pass: bool, detail: String) {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.results.push((name.to_string(), pass));
    }

    /// Run (or reuse) a moment-method simulation.
    fn hme(&mut self, label: &str, config: SimConfig) -> Option<&RunRecord> {
        if !self.runs.contains_key(label) {
            eprintln!("  running {label} ...");
            let started = Instant::now();
            match run(&config) {
                Ok(r) => {
                    eprintln!("  {label}: {} steps, {:.0} s", r.steps, started.elapsed().as_secs_f64());
                    self.runs.insert(label.to_string(), (config, r));
                }
                Err(f) => {
                    eprintln!("  {label} aborted: {}", f.error);
                    return None;
                }
            }
        }
        self.runs.get(label).map(|(_, r)| r)
    }
}

fn landau(n: usize, cfl: f64, kind: FilterKind, t_end: f64) -> SimConfig {
    let mut c = SimConfig::preset(Preset::Landau1d);
    c.nx = n;
    c.cfl = cfl;
    c.t_end = t_end;
    c.filter.kind = kind;
    c
}

fn rate_and_frequency(c: &SimConfig, r: &RunRecord) -> Option<(f64, f64)> {
    let peaks = find_peaks(&r.series.t, &r.series.e);
    let (ta, tb) = c.fit_window();
    let gamma = fit_damping_rate(&peaks, (ta, tb)).ok()?.rate;
    let omega = estimate_frequency(&peaks.window(ta, tb)).ok()?;
    Some((gamma, omega))
}

fn rel(x: f64, target: f64) -> f64 {
    (x / target - 1.0).abs()
}

/// Peaks never rise by more than `tol` relative to the previous one.
fn envelope_decreasing(p: &PeakList, tol: f64) -> (bool, f64) {
    let worst = p.values.windows(2).map(|w| w[1] / w[0] - 1.0).fold(f64::NEG_INFINITY, f64::max);
    (p.len() >= 2 && worst < tol, worst)
}

fn filter_exactness(h: &mut Harness) {
    let mut rng = StdRng::seed_from_u64(20_240_601);
    let sets: Vec<Arc<MultiIndexSet>> = [(1, 3), (1, 10), (1, 50), (1, 120), (2, 3), (2, 12), (2, 30)]
        .iter()
        .map(|&(d, m)| Arc::new(MultiIndexSet::new(d, m).unwrap()))
        .collect();
    let kinds = [FilterKind::HouLi, FilterKind::QuasiTimeConsistent];
    let mut bad = 0;
    for i in 0..1000 {
        let set = sets[i % sets.len()].clone();
        let dim = set.dim();
        let uth: f64 = rng.random_range(0.2..3.0);
        let u: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
        let coeffs: Vec<f64> = (0..set.len())
            .map(|j| {
                let scale = uth.powi(set.degree(j) as i32) / (1..=set.degree(j)).map(|x| x as f64).product::<f64>().sqrt();
                rng.random_range(-0.3..0.3) * scale
            })
            .collect();
        let mut state = MomentState::from_parts(set.clone(), &u, uth, coeffs).unwrap();
        state.coeffs[0] = rng.random_range(0.1..5.0);
        let spec = FilterSpec::of_kind(kinds[i % 2]);
        let dt = 10f64.powf(rng.random_range(-4.0..0.0));
        let out = apply_filter(&state, &spec, dt);
        let before = raw_moments(&state, 2).unwrap();
        let after = raw_moments(&out, 2).unwrap();
        let same = before.iter().zip(&after).all(|(a, b)| a.to_bits() == b.to_bits())
            && out.u == state.u
            && out.uth.to_bits() == state.uth.to_bits();
        bad += usize::from(!same);
    }
    h.report(
        "filter_exactness",
        bad == 0,
        format!("{} of 1000 random states changed m_0, m_1 or m_2 (bit level)", bad),
    );
}

fn recurrence_oracles(h: &mut Harness) {
    let (a, k, dv) = (0.5, 0.5, PI / 10.0);
    let j = dvm_half_width(dv);
    let worst = (0..256)
        .map(|i| {
            let x = i as f64 * 2.0 * PI / k / 256.0;
            (dvm_density(x, 0.0, a, k, dv, j) - dvm_density(x, 40.0, a, k, dv, j)).abs()
        })
        .fold(0.0, f64::max);
    h.report("recurrence_oracle_dvm", worst < 1e-12, format!("max |n(x,0) - n(x,40)| = {worst:.2e} (< 1e-12)"));

    let col = HermiteCollocation::new(50).unwrap();
    let (mut herm, mut exact) = (0.0f64, 0.0f64);
    for it in 0..=200 {
        let t = 35.0 + 0.1 * it as f64;
        for i in 0..128 {
            let x = i as f64 * 2.0 * PI / k / 128.0;
            herm = herm.max((col.density(x, t, a, k) - 1.0).abs());
            exact = exact.max((exact_free_streaming_density(x, t, a, k) - 1.0).abs());
        }
    }
    h.report(
        "recurrence_oracle_hermite",
        herm > 0.1 * a && exact < 1e-6,
        format!("on t in [35, 55]: collocation amplitude {herm:.3} (> {:.3}), exact deviation {exact:.1e} (< 1e-6)", 0.1 * a),
    );
}

fn filter_validation(h: &mut Harness) {
    let dt = 1e-3;
    let mut lines = Vec::new();
    let mut pass = true;
    for kind in [FilterKind::HouLi, FilterKind::QuasiTimeConsistent] {
        for m in [30, 90, 300] {
            let r = validate_filter(&FilterSpec::of_kind(kind), m, dt).unwrap();
            pass &= r.all_pass();
            lines.push(format!("{kind} M={m} {}", if r.all_pass() { "ok" } else { "fails" }));
        }
    }
    let e = validate_filter(&FilterSpec::of_kind(FilterKind::Exponential), 30, dt).unwrap();
    pass &= !e.conservation && e.rotational && e.monotone && e.limit;
    lines.push(format!("exponential fails only (b): {}", !e.conservation && e.rotational && e.monotone && e.limit));
    h.report("filter_validation", pass, lines.join("; "));
}

fn landau_rate_and_frequency(h: &mut Harness) {
    let mut pts = Vec::new();
    for n in [200, 400, 800] {
        let c = landau(n, 0.45, FilterKind::QuasiTimeConsistent, 50.0);
        let dx = c.lengths().0 / n as f64;
        if let Some(r) = h.hme(&format!("landau_n{n}"), c.clone()) {
            if let Some((g, w)) = rate_and_frequency(&c, r) {
                eprintln!("  N={n}: gamma = {g:.5}, omega = {w:.5}");
                pts.push((n, dx, g, w));
            }
        }
    }
    let detail: Vec<String> = pts.iter().map(|(n, _, g, w)| format!("N={n} gamma={g:.5} omega={w:.5}")).collect();
    if h.wants("landau_rate") {
        let dx: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let g: Vec<f64> = pts.iter().map(|p| p.2).collect();
        match (pts.len() == 3).then(|| fit_line(&dx, &g).ok()).flatten() {
            Some(fit) => h.report(
                "landau_rate_extrapolated",
                rel(fit.intercept, GAMMA) <= 0.10,
                format!("gamma(dx->0) = {:.5}, {:.1}% from -0.0126 (<= 10%); {}", fit.intercept, 100.0 * rel(fit.intercept, GAMMA), detail.join(", ")),
            ),
            None => h.report("landau_rate_extrapolated", false, format!("missing runs: {}", detail.join(", "))),
        }
        match pts.iter().find(|p| p.0 == 800) {
            Some(p) => h.report(
                "landau_rate_n800",
                rel(p.2, GAMMA) <= 0.25,
                format!("gamma = {:.5}, {:.1}% from -0.0126 (<= 25%)", p.2, 100.0 * rel(p.2, GAMMA)),
            ),
            None => h.report("landau_rate_n800", false, "run missing".into()),
        }
    }
    if h.wants("landau_frequency") {
        let hi: Vec<_> = pts.iter().filter(|p| p.0 >= 400).collect();
        let pass = hi.len() == 2 && hi.iter().all(|p| rel(p.3, OMEGA) <= 0.02);
        let d: Vec<String> = hi.iter().map(|p| format!("N={} omega={:.5} ({:.2}%)", p.0, p.3, 100.0 * rel(p.3, OMEGA))).collect();
        h.report("landau_frequency", pass, format!("{} (<= 2% of 1.1598)", d.join(", ")));
    }
}

fn time_consistency(h: &mut Harness) {
    let spread = |h: &mut Harness, kind: FilterKind, tag: &str| -> Option<(f64, f64, f64)> {
        let mut g = Vec::new();
        for cfl in [0.45, 0.1125] {
            let label = if kind == FilterKind::QuasiTimeConsistent && cfl == 0.45 {
                "landau_n800".to_string()
            } else {
                format!("landau_n800_{tag}_cfl{cfl}")
            };
            let c = landau(800, cfl, kind, 50.0);
            let r = h.hme(&label, c.clone())?;
            g.push(rate_and_frequency(&c, r)?.0);
        }
        Some(((g[0] - g[1]).abs() / g[1].abs(), g[0], g[1]))
    };
    let quasi = spread(h, FilterKind::QuasiTimeConsistent, "quasi");
    let hou = spread(h, FilterKind::HouLi, "hou_li");
    match (quasi, hou) {
        (Some(q), Some(p)) => h.report(
            "quasi_time_consistency",
            q.0 < p.0,
            format!(
                "relative gamma change CFL 0.45 -> 0.1125: quasi {:.4} ({:.5} vs {:.5}) < hou_li {:.4} ({:.5} vs {:.5})",
                q.0, q.1, q.2, p.0, p.1, p.2
            ),
        ),
        _ => h.report("quasi_time_consistency", false, "a run failed".into()),
    }
}

fn recurrence_suppression(h: &mut Harness) {
    let none = landau(800, 0.45, FilterKind::None, 100.0);
    let quasi = landau(800, 0.45, FilterKind::QuasiTimeConsistent, 100.0);
    let unfiltered = h.hme("landau_n800_none_t100", none).map(|r| r.series.clone());
    let filtered = h.hme("landau_n800_quasi_t100", quasi).map(|r| r.series.clone());
    let (Some(a), Some(b)) = (unfiltered, filtered) else {
        h.report("recurrence_suppression", false, "a run failed".into());
        return;
    };
    let pa = find_peaks(&a.t, &a.e);
    let before = pa.window(0.0, 65.0);
    let floor = before.values.iter().copied().fold(f64::INFINITY, f64::min);
    let late = a
        .t
        .iter()
        .zip(&a.e)
        .filter(|(t, _)| **t >= 65.0 && **t <= 85.0)
        .map(|(_, e)| *e)
        .fold(0.0, f64::max);
    let pb = find_peaks(&b.t, &b.e).window(5.0, 100.0);
    let (mono, worst) = envelope_decreasing(&pb, 0.01);
    h.report(
        "recurrence_suppression",
        late > 10.0 * floor && mono,
        format!(
            "none: max E on [65,85] / min earlier peak = {:.1} (> 10); quasi: {} peaks on [5,100], largest rise {:+.2}% (< 1%)",
            late / floor,
            pb.len(),
            100.0 * worst
        ),
    );
}

/// Exponential-growth rate of `E` from a least-squares fit of `ln E` on `[t_a, t_b]`.
fn linear_growth(s: &TimeSeries, t_a: f64, t_b: f64) -> Option<f64> {
    let (t, y): (Vec<f64>, Vec<f64>) = s
        .t
        .iter()
        .zip(&s.e)
        .filter(|(t, _)| **t >= t_a && **t <= t_b)
        .map(|(t, e)| (*t, e.ln()))
        .unzip();
    fit_line(&t, &y).ok().map(|f| f.rate)
}

/// Time of the maximum of `E`, and the ratio of the maximum to `E(0)`.
fn peak(s: &TimeSeries) -> (f64, f64) {
    let (i_max, e_max) = s.e.iter().enumerate().fold((0, 0.0), |m, (i, &e)| if e > m.1 { (i, e) } else { m });
    (s.t[i_max], e_max / s.e[0])
}

fn two_stream(h: &mut Harness) {
    let c = SimConfig::preset(Preset::TwoStream);
    let hme = h.hme("two_stream", c.clone()).map(|r| r.series.clone());
    let mut dvm = Vec::new();
    for n in [400, 800] {
        let cd = SimConfig { nx: n, ..c.clone() };
        eprintln!("  running dvm two_stream N={n} ...");
        match dvm_vlasov_run(&cd) {
            Ok(r) => {
                eprintln!("  dvm N={n}: {} steps, {:.0} s", r.steps, r.wall_seconds);
                dvm.push(r.series);
            }
            Err(f) => eprintln!("  dvm N={n} aborted: {}", f.error),
        }
    }
    let (Some(hme), [d400, d800]) = (hme, dvm.as_slice()) else {
        h.report("two_stream_growth", false, "a run failed".into());
        h.report("two_stream_saturation", false, "a run failed".into());
        return;
    };
    let (t_a, t_b) = TWO_STREAM_FIT_WINDOW;
    let g = |s: &TimeSeries| linear_growth(s, t_a, t_b);
    let (Some(gh), Some(g4), Some(g8)) = (g(&hme), g(d400), g(d800)) else {
        h.report("two_stream_growth", false, "fit window empty".into());
        h.report("two_stream_saturation", false, "fit window empty".into());
        return;
    };
    let reference = 2.0 * g8 - g4;
    h.report(
        "two_stream_growth",
        gh > 0.0 && reference > 0.0 && rel(gh, reference) <= 0.15,
        format!(
            "growth on [{t_a}, {t_b}]: hme {gh:.4}, dvm N=400 {g4:.4}, N=800 {g8:.4} -> extrapolated {reference:.4}; difference {:.1}% (<= 15%)",
            100.0 * rel(gh, reference)
        ),
    );
    let end = *hme.t.last().unwrap();
    let saturated = |s: &TimeSeries| {
        let (t_peak, ratio) = peak(s);
        t_peak < end - 5.0 && ratio > 100.0
    };
    let ((th, rh), (td, rd)) = (peak(&hme), peak(d800));
    h.report(
        "two_stream_saturation",
        saturated(&hme) && saturated(d800),
        format!(
            "peak of E before t = {:.0} and above 100 E(0): hme at t = {th:.1} ({rh:.0} E(0)), dvm N=800 at t = {td:.1} ({rd:.0} E(0))",
            end - 5.0
        ),
    );
}

/// Past the initial Landau-damped transient, before the nonlinear bend of the reference.
const TWO_STREAM_FIT_WINDOW: (f64, f64) = (20.0, 35.0);

fn smoke_2d(h: &mut Harness) {
    let c = SimConfig {
        m: 20,
        nx: 64,
        ny: 64,
        t_end: 20.0,
        ..SimConfig::preset(Preset::Landau2d)
    };
    let Some(r) = h.hme("landau_2d", c) else {
        h.report("smoke_2d", false, "run aborted".into());
        return;
    };
    let p = find_peaks(&r.series.t, &r.series.e);
    let (mono, worst) = envelope_decreasing(&p, 0.01);
    h.report("smoke_2d", mono, format!("{} peaks, largest rise {:+.2}% (< 1%)", p.len(), 100.0 * worst));
}

fn conservation(h: &mut Harness) {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut names = Vec::new();
    for (label, (c, r)) in &h.runs {
        let s = &r.series;
        let scale = thermal_momentum(&initial_grid(c).unwrap());
        let mass = TimeSeries::drift(&s.mass, s.mass[0]);
        let mut momentum = TimeSeries::drift(&s.momentum, scale);
        if s.dim == 2 {
            momentum = momentum.max(TimeSeries::drift(&s.momentum_y, scale));
        }
        let energy = TimeSeries::drift(&s.energy, s.energy[0]);
        eprintln!("  {label}: mass {mass:.1e} momentum {momentum:.1e} energy {energy:.1e}");
        worst = (worst.0.max(mass), worst.1.max(momentum), worst.2.max(energy));
        names.push(label.clone());
    }
    let pass = !names.is_empty() && worst.0 < 1e-10 && worst.1 < 1e-10 && worst.2 < 1e-4;
    h.report(
        "conservation",
        pass,
        format!(
            "over {} runs: mass {:.1e} (< 1e-10), momentum {:.1e} (< 1e-10), energy {:.1e} (< 1e-4)",
            names.len(),
            worst.0,
            worst.1,
            worst.2
        ),
    );
}

fn main() {
    let only = std::env::var("FHME_ACCEPTANCE_ONLY")
        .map(|s| s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect())
        .unwrap_or_default();
    let mut h = Harness {
        only,
        results: Vec::new(),
        runs: BTreeMap::new(),
    };
    let started = Instant::now();
    let criteria: [(&str, fn(&mut Harness)); 9] = [
        ("filter_exactness", filter_exactness),
        ("recurrence_oracle", recurrence_oracles),
        ("filter_validation", filter_validation),
        ("landau_rate,landau_frequency", landau_rate_and_frequency),
        ("quasi_time_consistency", time_consistency),
        ("recurrence_suppression", recurrence_suppression),
        ("two_stream_growth,two_stream_saturation", two_stream),
        ("smoke_2d", smoke_2d),
        ("conservation", conservation),
    ];
    for (names, f) in criteria {
        if names.split(',').any(|n| h.wants(n)) {
            f(&mut h);
        }
    }
    let failed = h.results.iter().filter(|r| !r.1).count();
    println!(
        "acceptance: {} passed, {failed} failed ({:.0} s)",
        h.results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 && std::env::var("FHME_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
