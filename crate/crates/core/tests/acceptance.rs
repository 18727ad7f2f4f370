//! Acceptance checks: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use logperiod::blowup::{integral_invariance_check, make_proper, BlowupTower, ChartId, DEFAULT_CAP};
use logperiod::complexint::{
    annulus_slice_decay, integrate_admissible, reduce_to_real_tasks, AnnulusVariant, ComplexLogForm, Partition,
};
use logperiod::integrate::{
    default_decay_params, integrate_log_form, pushforward_bound_check, slice_decay_report, BoundVerdict,
    IntegralResult, LadderVerdict, QuadConfig,
};
use logperiod::polyform::{parse_log_form, parse_poly, rat, LogForm, Polynomial, Variables};
use logperiod::region::{
    is_allowable, is_almost_strictly_allowable, is_strictly_allowable, BoundingBox, Constraint, Face, ProbeConfig,
    Region, Verdict,
};
use logperiod::stokes::{check_stokes, double_boundary, excised_simplex, parse_smooth_form, stokes_corpus, SimplexMap};

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn complex_box(k: usize) -> Option<BoundingBox> {
    Some(BoundingBox(vec![(rat(-1, 1), rat(1, 1)); 2 * k]))
}

fn disk(extra: &[&str]) -> Region {
    let mut cs = vec!["zr1^2 + zi1^2 <= 1"];
    cs.extend_from_slice(extra);
    Region::complex_from_strings(1, 1, &[&cs], complex_box(1)).unwrap()
}

fn triangle_in(r: &IntegralResult) -> bool {
    r.value.abs() <= r.abs_value + 3.0 * (r.error + r.abs_error) + 1e-12
}

fn log_identity() -> Outcome {
    let a = Region::from_strings(1, 1, &[&[]], Some(BoundingBox(vec![(rat(1, 2), rat(1, 1))]))).unwrap();
    let w = parse_log_form("dr1/r1", 1, 1).unwrap();
    let start = Instant::now();
    let r = integrate_log_form(&a, &w, &QuadConfig::default()).unwrap();
    let dt = start.elapsed();
    ensure((r.value - 2f64.ln()).abs() < 1e-6, format!("value {}", r.value))?;
    ensure(dt < Duration::from_secs(1), format!("took {dt:?}"))?;
    ensure(triangle_in(&r), "triangle inequality")?;
    Ok(format!("value={:.7} time={dt:.2?}", r.value))
}

fn dilogarithm() -> Outcome {
    let w = parse_log_form("dr1/r1 ^ dr2/r2", 2, 2).unwrap();
    let start = Instant::now();
    let r = integrate_log_form(&s_half(), &w, &QuadConfig::default()).unwrap();
    let dt = start.elapsed();
    let oracle = li2_half();
    let closed = std::f64::consts::PI.powi(2) / 12.0 - 2f64.ln().powi(2) / 2.0;
    ensure(
        (oracle - closed).abs() < 1e-12,
        "series oracle disagrees with the closed form",
    )?;
    ensure((r.value.abs() - oracle).abs() < 1e-3, format!("value {}", r.value))?;
    ensure(
        matches!(r.verdict, LadderVerdict::Converged { .. }),
        format!("verdict {:?}", r.verdict),
    )?;
    ensure(dt < Duration::from_secs(30), format!("took {dt:?}"))?;
    ensure(triangle_in(&r), "triangle inequality")?;
    Ok(format!("value={:.7} oracle={oracle:.7} time={dt:.2?}", r.value))
}

fn violated_at(v: &Verdict) -> Option<Face> {
    match v {
        Verdict::Violated { face, .. } => Some(face.clone()),
        Verdict::Allowable { .. } => None,
    }
}

fn allowability_suite() -> Outcome {
    let probe = ProbeConfig::default();
    let check = |a: &Region| {
        let v = is_allowable(a, &probe).unwrap();
        assert!(!v.heuristic(), "sampled verdict on a linear region: {v}");
        v
    };
    ensure(check(&s_half()).passed(), "S_1/2 should be allowable")?;
    let unit = real(2, 2, &[&[]]);
    ensure(
        violated_at(&check(&unit)) == Some(Face::from_one_based(&[1])),
        "unit box should fail at {1}",
    )?;
    ensure(
        check(&real(2, 1, &[&["x2 <= r1"]])).passed(),
        "triangle at p=1 should be allowable",
    )?;
    ensure(
        !check(&real(2, 2, &[&["r2 <= r1"]])).passed(),
        "triangle at p=2 should be violated",
    )?;
    let with_origin = real(2, 2, &[&["r1 + r2 >= 1", "r2 <= 1/2"], &["r1 = 0", "r2 = 0"]]);
    let v = check(&with_origin);
    ensure(
        violated_at(&v) == Some(Face::from_one_based(&[1, 2])),
        format!("origin cell: {v}"),
    )?;
    Ok("5 verdicts exact".into())
}

fn divergence() -> Outcome {
    let w = parse_log_form("dr1/r1 ^ dr2/r2", 2, 2).unwrap();
    let r = integrate_log_form(&real(2, 2, &[&[]]), &w, &QuadConfig::default()).unwrap();
    ensure(
        r.verdict == LadderVerdict::Diverging,
        format!("verdict {:?}", r.verdict),
    )?;
    ensure(r.ladder.entries.len() >= 12, "ladder too short")?;
    let mut worst = 0f64;
    for e in &r.ladder.entries[5..12] {
        let want = e.param.ln().powi(2);
        worst = worst.max((e.value - want).abs() / want);
    }
    ensure(worst < 1e-2, format!("relative deviation {worst:e}"))?;
    ensure(triangle_in(&r), "triangle inequality")?;
    Ok(format!("diverging, worst relative deviation {worst:.1e}"))
}

fn constant_term_nonzero(g: &Polynomial, p: usize) -> bool {
    let mut h = g.clone();
    for i in 0..p {
        h = h.substitute_value(i, &rat(0, 1));
    }
    !h.is_zero()
}

fn properness() -> Outcome {
    let vars = Variables::real(2, 2);
    let mut depths = Vec::new();
    for (text, want) in [("r1 + r2", 1), ("r1 + r2^2", 2)] {
        let f = parse_poly(text, &vars).unwrap();
        let out = make_proper(&f, 2, DEFAULT_CAP).unwrap();
        ensure(
            out.complete && out.tower.depth() == want,
            format!("{text}: depth {}", out.tower.depth()),
        )?;
        for c in out.tower.leaves() {
            let g = c.strict_transform(&f).unwrap();
            ensure(
                constant_term_nonzero(&g, 2),
                format!("{text}: chart {} gives {g}", c.label()),
            )?;
        }
        let again = make_proper(&f, 2, DEFAULT_CAP).unwrap();
        ensure(again == out, "not deterministic")?;
        depths.push(out.tower.depth());
    }
    Ok(format!("depths {depths:?}"))
}

fn invariance() -> Outcome {
    let w = parse_log_form("dr1/r1 ^ dr2/r2", 2, 2).unwrap();
    let t = BlowupTower::new(2, 2)
        .blow_up_face(ChartId(0), &Face::from_one_based(&[1, 2]))
        .unwrap();
    let r = integral_invariance_check(&s_half(), &w, &t, &QuadConfig::default()).unwrap();
    ensure(r.pass, format!("{r}"))?;
    ensure((r.chart_sum - li2_half()).abs() < 5e-3 * li2_half(), format!("{r}"))?;
    Ok(format!("difference {:.1e}", r.difference()))
}

fn decay_law() -> Outcome {
    let a = real(2, 2, &[&["r1 + r2 >= 1"]]);
    let w = parse_log_form("dr2/r2", 2, 2).unwrap();
    let start = Instant::now();
    let r = slice_decay_report(&a, &[1, 0], &w, &default_decay_params(), &QuadConfig::default()).unwrap();
    let dt = start.elapsed();
    for &(t, v) in &r.points {
        ensure((v + (1.0 - t).ln()).abs() < 1e-6, format!("t={t}: {v}"))?;
    }
    let fit = r.fit.as_ref().ok_or("no fit")?;
    ensure((0.90..=1.10).contains(&fit.alpha), format!("alpha {}", fit.alpha))?;
    ensure(fit.residual < 0.05, format!("residual {}", fit.residual))?;
    ensure(dt < Duration::from_secs(20), format!("took {dt:?}"))?;
    Ok(format!(
        "alpha={:.4} residual={:.1e} time={dt:.2?}",
        fit.alpha, fit.residual
    ))
}

fn quarter_disk() -> Outcome {
    let w = ComplexLogForm::parse("dz1/z1 ^ dzbar1", 1).unwrap();
    let cfg = QuadConfig::default();
    let probe = ProbeConfig::default();
    let q = integrate_admissible(&disk(&["zr1 >= 0", "zi1 >= 0"]), &w, 2, &cfg, &probe).unwrap();
    ensure(
        (q.re + 2.0).abs() < 1e-3 && (q.im + 2.0).abs() < 1e-3,
        format!("quarter {q}"),
    )?;
    let f = integrate_admissible(&disk(&[]), &w, 2, &cfg, &probe).unwrap();
    ensure(f.re.abs() < 1e-3 && f.im.abs() < 1e-3, format!("disk {f}"))?;
    for r in [&q, &f] {
        ensure(
            r.re.hypot(r.im) <= r.abs_value + 3.0 * r.abs_error + 1e-9,
            "triangle inequality",
        )?;
    }
    Ok(format!(
        "quarter={:.5}{:+.5}i disk={:.1e}{:+.1e}i",
        q.re, q.im, f.re, f.im
    ))
}

fn admissible_corpus() -> Vec<(Region, &'static str, usize)> {
    let two = complex_box(2);
    vec![
        (disk(&["zr1 >= 0", "zi1 >= 0"]), "dz1/z1 ^ dzbar1", 2),
        (disk(&[]), "dz1/z1 ^ dzbar1", 2),
        (disk(&["zi1 >= 0", "zr1 + zi1 <= 1"]), "dz1/z1 ^ dzbar1", 2),
        (
            Region::complex_from_strings(1, 1, &[&["zr1^2 + zi1^2 = 1/4"]], complex_box(1)).unwrap(),
            "dz1/z1",
            1,
        ),
        (
            Region::complex_from_strings(2, 2, &[&["zr2^2 + zi2^2 <= zr1^2 + zi1^2", "zr1^2 + zi1^2 <= 1"]], two)
                .unwrap(),
            "dz1/z1 ^ dz2/z2 ^ dzbar1 ^ dzbar2",
            4,
        ),
    ]
}

fn reduction_property() -> Outcome {
    let corpus = admissible_corpus();
    let mut baseline: Option<Vec<(bool, bool)>> = None;
    let mut flagged = 0;
    let mut tasks = 0;
    for seed in 0..10 {
        let probe = ProbeConfig {
            seed,
            ..ProbeConfig::default()
        };
        let mut verdicts = Vec::new();
        for (a, w, m) in &corpus {
            let w = ComplexLogForm::parse(w, a.n() / 2).unwrap();
            let red = reduce_to_real_tasks(a, &w, *m, &probe).unwrap();
            ensure(!red.tasks.is_empty(), "empty reduction")?;
            for t in &red.tasks {
                let v = t.allowability(&[], &probe).unwrap();
                ensure(v.passed(), format!("seed {seed}: task {} fails: {v}", t.partition))?;
                verdicts.push((v.passed(), red.heuristic || v.heuristic()));
            }
        }
        if seed == 0 {
            flagged = verdicts.iter().filter(|v| v.1).count();
            tasks = verdicts.len();
        }
        match &baseline {
            None => baseline = Some(verdicts),
            Some(b) => ensure(*b == verdicts, format!("seed {seed} changed a verdict"))?,
        }
    }
    ensure(flagged > 0, "disk pieces should carry the sampled flag")?;

    let probe = ProbeConfig::default();
    let a =
        Region::complex_from_strings(2, 2, &[&["zr1^2 + zi1^2 <= 1", "zr2^2 + zi2^2 = 1/4"]], complex_box(2)).unwrap();
    let w = ComplexLogForm::parse("dz1/z1 ^ dz2/z2 ^ dzbar1", 2).unwrap();
    let red = reduce_to_real_tasks(&a, &w, 3, &probe).unwrap();
    ensure(!red.tasks.is_empty(), "counterexample has no tasks")?;
    for t in &red.tasks {
        ensure(
            t.partition
                == Partition {
                    p: vec![],
                    q: vec![1],
                    r: vec![0],
                },
            format!("partition {}", t.partition),
        )?;
        match t.allowability(&[0], &probe).unwrap() {
            Verdict::Violated { face, dim: 2, .. } if face == Face::new(vec![0]) => {}
            v => return Err(format!("counterexample: {v}")),
        }
    }
    Ok(format!(
        "{tasks} tasks stable over 10 seeds ({flagged} sampled); counterexample fails at {{r1}}"
    ))
}

fn annulus_decay() -> Outcome {
    let cells = ["zr2^2 + zi2^2 <= zr1^2 + zi1^2", "zr1^2 + zi1^2 <= 1"];
    let a = Region::complex_from_strings(2, 2, &[&cells], complex_box(2)).unwrap();
    let w = ComplexLogForm::parse("dz1/z1 ^ dz2/z2 ^ dzbar2", 2).unwrap();
    let ts: Vec<f64> = (2..=10).map(|k| 0.5f64.powi(k)).collect();
    let start = Instant::now();
    let rep = annulus_slice_decay(
        &a,
        &w,
        &ts,
        AnnulusVariant::Dominated,
        &QuadConfig::default(),
        &ProbeConfig::default(),
    )
    .unwrap();
    let dt = start.elapsed();
    let alpha = rep.fit.as_ref().ok_or("no fit")?.alpha;
    ensure((0.8..=1.2).contains(&alpha), format!("alpha {alpha}"))?;
    ensure(rep.points.windows(2).all(|p| p[1].1 < p[0].1), "values do not decrease")?;
    ensure(dt < Duration::from_secs(60), format!("took {dt:?}"))?;
    Ok(format!("alpha={alpha:.4} time={dt:.2?}"))
}

fn stokes() -> Outcome {
    let cfg = QuadConfig::default();
    let mut worst = 0f64;
    let corpus = stokes_corpus().unwrap();
    ensure(corpus.len() == 10, "corpus size")?;
    for case in &corpus {
        let rep = check_stokes(&case.map, &case.form, &cfg).unwrap();
        ensure(rep.residual < 1e-6, format!("{}: {rep}", case.name))?;
        worst = worst.max(rep.residual);
    }
    let rep = check_stokes(
        &SimplexMap::identity(2).unwrap(),
        &parse_smooth_form("x1*dx2", 2).unwrap(),
        &cfg,
    )
    .unwrap();
    ensure(
        (rep.lhs - 0.5).abs() < 1e-9 && (rep.rhs - 0.5).abs() < 1e-9,
        format!("calibration {rep}"),
    )?;
    Ok(format!("max residual {worst:.1e}; calibration {rep}"))
}

fn properties() -> Outcome {
    let maps = chart_maps();
    let forms: Vec<LogForm> = [
        "dr1/r1 ^ dr2/r2",
        "x3*dr1/r1 ^ dx3 + r2^2*dr2/r2 ^ dx3",
        "(r1 - x3)*dr1/r1 ^ dr2/r2",
    ]
    .iter()
    .map(|s| parse_log_form(s, 3, 2).unwrap())
    .collect();
    for f in &maps {
        for g in &maps {
            let fg = f.compose(g).unwrap();
            for w in &forms {
                ensure(
                    w.pullback(&fg).unwrap() == w.pullback(f).unwrap().pullback(g).unwrap(),
                    "pullback functoriality",
                )?;
            }
        }
    }
    for s in ["x1^2*x2*x3", "x1*x3*dx2 + x2^3*dx1", "x1*dx2 ^ dx3 + x2*x3*dx1 ^ dx2"] {
        let w = parse_log_form(s, 3, 0).unwrap();
        ensure(
            w.exterior_d().unwrap().exterior_d().unwrap().is_zero(),
            format!("d d of {s}"),
        )?;
    }
    ensure(
        (2..=4).all(|m| double_boundary(m).unwrap().iter().all(|(_, c)| *c == 0)),
        "boundary of boundary",
    )?;

    let cfg = QuadConfig::default();
    let top = parse_smooth_form("dx1 ^ dx2 ^ dx3", 3).unwrap();
    let mut last = f64::INFINITY;
    for k in 0..6 {
        let r = integrate_log_form(&excised_simplex(3, &rat(k, 30)).unwrap(), &top, &cfg).unwrap();
        ensure(r.value < last, "excised volumes do not shrink")?;
        last = r.value;
    }

    let mut results = 0;
    for (region, w, cut) in additivity_corpus() {
        let whole = integrate_log_form(&region, &w, &cfg).unwrap();
        let lo = integrate_log_form(&region.restrict(&[Constraint::le(cut.clone())]), &w, &cfg).unwrap();
        let hi = integrate_log_form(&region.restrict(&[Constraint::le(cut.scale(&rat(-1, 1)))]), &w, &cfg).unwrap();
        for r in [&whole, &lo, &hi] {
            ensure(triangle_in(r), format!("triangle inequality: {r}"))?;
            results += 1;
        }
        let tol = 1e-9 + 3.0 * (whole.error + lo.error + hi.error);
        ensure(
            (whole.value - lo.value - hi.value).abs() <= tol,
            format!("additivity {} vs {} + {}", whole.value, lo.value, hi.value),
        )?;
    }

    let probe = ProbeConfig::default();
    let corpus = linear_corpus();
    for region in &corpus {
        let strict = std::iter::once(Face::ambient())
            .chain(Face::all_nonempty(region.p()))
            .all(|f| is_strictly_allowable(region, &f).unwrap().strict);
        let almost = is_almost_strictly_allowable(region).unwrap().strict;
        let allowable = is_allowable(region, &probe).unwrap().passed();
        ensure(
            (!strict || almost) && (!almost || allowable),
            format!("implication chain on {region:?}"),
        )?;
    }

    for (s, f, a) in bound_corpus() {
        let r = pushforward_bound_check(&s, &f, &a, &cfg).unwrap();
        ensure(r.verdict == BoundVerdict::Pass, format!("bound check {r}"))?;
    }
    Ok(format!(
        "{results} results, {} linear regions, 3 bound cases",
        corpus.len()
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("logarithm identity", log_identity),
        ("dilogarithm identity", dilogarithm),
        ("allowability suite", allowability_suite),
        ("divergence detection", divergence),
        ("properness by blow-ups", properness),
        ("blow-up invariance", invariance),
        ("slice decay", decay_law),
        ("quarter disk", quarter_disk),
        ("real reduction", reduction_property),
        ("annulus decay", annulus_decay),
        ("stokes residuals", stokes),
        ("property suites", properties),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    let total = start.elapsed();
    let fast = total < Duration::from_secs(600);
    println!(
        "total time {total:.1?} ({})",
        if fast { "within 10 min" } else { "over 10 min" }
    );
    if failed > 0 || !fast {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
