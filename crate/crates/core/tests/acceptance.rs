//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use common::{random_perturbed_circle, random_unit};
use curvebound::bands::{band_point, band_self_intersections, meridian_path, min_crossing_length, regular_band, BandSimplicity};
use curvebound::classify::{
    classify_curve, component_count, is_condensed, is_diffuse, plane_rotation_number, rotation_number,
    same_component, total_curvature_bound_check, ClassifyError, ClassifyOptions, NuMode,
};
use curvebound::convexity::{locate_origin, steinitz_simplex, OriginTag, PointCloud3, DEFAULT_BOUNDARY_TOL};
use curvebound::curve::{
    arccot, check_membership, integrate_frames, total_curvature, translate_curve, CurvatureBound, SpaceSpec,
};
use curvebound::fixtures::{circle, perturbed_circle, Mode};
use curvebound::geom3::{Rotation, UnitQuaternion, UnitVec3, Vec3};
use curvebound::homotopy::{
    bending_family, find_antipodal_pair, graft_antipodal, graft_quadruple, uniform_grid, validate_homotopy,
    HomotopyPath,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn space(k1: f64, k2: f64) -> SpaceSpec {
    SpaceSpec::from_values(k1, k2).unwrap()
}

fn c1_component_counts() -> Outcome {
    let cases = [
        (f64::NEG_INFINITY, f64::INFINITY, 2usize),
        (0.0, f64::INFINITY, 3),
        (1.0 / 3f64.sqrt(), f64::INFINITY, 4),
        (-1.0, 1.0, 3),
    ];
    let mut got = Vec::new();
    let mut worst = Duration::ZERO;
    for (a, b, want) in cases {
        let s = space(a, b);
        let start = Instant::now();
        let c = component_count(&s);
        worst = worst.max(start.elapsed());
        got.push((s.width(), c, want));
    }
    // through the command line as well
    let mut out = Vec::new();
    let mut err = Vec::new();
    let start = Instant::now();
    let code = curvebound::cli::run_command(["curvebound", "count", "--kappa1", "0", "--kappa2", "+inf"], &mut out, &mut err);
    let cli_time = start.elapsed();
    let cli_ok = code == 0 && String::from_utf8_lossy(&out).trim() == "3";
    let pass = got.iter().all(|(_, c, w)| c == w) && cli_ok && worst < Duration::from_millis(1) && cli_time < Duration::from_millis(1);
    let shown: Vec<String> = got.iter().map(|(w, c, _)| format!("width {w:.4} -> {c}")).collect();
    ok(pass, format!("{}; cli count 0 +inf -> {}; max {:?}, cli {:?}", shown.join(", "), String::from_utf8_lossy(&out).trim(), worst, cli_time))
}

fn c2_little() -> Outcome {
    let start = Instant::now();
    let s = space(0.0, f64::INFINITY);
    let idx: Vec<usize> = (1..=5)
        .map(|k| classify_curve(&circle(PI / 4.0, k, 512).unwrap(), &s).unwrap().component_index)
        .collect();
    let el = start.elapsed();
    ok(idx == [1, 2, 3, 2, 3] && el < Duration::from_secs(1), format!("sigma_1..5 -> {idx:?} in {el:?}"))
}

fn c3_stabilization() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for k0 in [0.0, 1.0 / 3f64.sqrt() + 0.01, 1.01] {
        let rho0 = arccot(k0);
        let threshold = (PI / rho0).floor() as usize;
        let s = space(k0, f64::INFINITY);
        let sig = |k| circle(rho0 / 2.0, k, 256).unwrap();
        let mut row = Vec::new();
        for k in 1..=threshold + 1 {
            let same = same_component(&sig(k), &sig(k + 2), &s).unwrap();
            pass &= same == (k >= threshold);
            row.push(if same { 'T' } else { 'F' });
        }
        lines.push(format!("k0={k0:.3} floor={threshold} {}", row.into_iter().collect::<String>()));
    }
    let el = start.elapsed();
    ok(pass && el < Duration::from_secs(2), format!("{} in {el:?}", lines.join("; ")))
}

fn c4_bending() -> Outcome {
    let start = Instant::now();
    let grid = uniform_grid(64);
    let curves = bending_family(1, &grid, 1024).unwrap();
    let mut reports = Vec::new();
    for k1 in [1.05, 0.95] {
        let s = SpaceSpec::symmetric(k1).unwrap();
        let path = HomotopyPath::new(s.clone(), grid.clone(), curves.clone()).unwrap();
        reports.push(validate_homotopy(&path, &s));
    }
    let el = start.elapsed();
    let (wide, narrow) = (&reports[0], &reports[1]);
    let max_k = wide.max_abs_kappa;
    let pass = wide.pass
        && !narrow.pass
        && narrow.has_curvature_violation()
        && (max_k - 1.0).abs() < 1e-3
        && el < Duration::from_secs(5);
    ok(
        pass,
        format!(
            "kappa1=1.05 pass={} ; kappa1=0.95 pass={} curvature violation={} ; max|kappa|={max_k:.6} in {el:?}",
            wide.pass,
            narrow.pass,
            narrow.has_curvature_violation()
        ),
    )
}

fn c5_frames() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut orth, mut lift, mut factor) = (0.0f64, 0.0f64, 0.0f64);
    let eps = 1e-5;
    for i in 0..100 {
        let rho = rng.random_range(0.3..2.8);
        let c = random_perturbed_circle(&mut rng, rho, 1 + i % 3, 512, cot_floor(rho), 0.5);
        let fc = integrate_frames(&c);
        orth = orth.max(fc.max_orthogonality_defect());
        lift = lift.max(fc.max_lift_defect());
        // finite differences of the covering map at lifts along the curve
        for _ in 0..4 {
            let z = fc.lift_at(rng.random_range(0.0..1.0));
            let u = random_unit(&mut rng).vec();
            let plus = (z * UnitQuaternion::exp_imag(&(u * eps))).to_rotation();
            let minus = (z * UnitQuaternion::exp_imag(&(u * -eps))).to_rotation();
            let d = (plus.matrix() - minus.matrix()) / (2.0 * eps);
            factor = factor.max((d.norm_squared() / u.norm_squared() - 8.0).abs());
        }
    }
    let el = start.elapsed();
    ok(
        orth < 1e-9 && lift < 1e-9 && factor < 1e-6 && el < Duration::from_secs(10),
        format!("orthogonality {orth:.2e}, lift {lift:.2e}, |factor-8| {factor:.2e} in {el:?}"),
    )
}

// a curvature floor a little below cot(rho), for perturbation budgets
fn cot_floor(rho: f64) -> f64 {
    curvebound::curve::cot(rho) - 0.8
}

fn c6_translation() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut drho, mut dinv, mut dpos) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..50 {
        let rho = rng.random_range(0.4..2.7);
        let c = random_perturbed_circle(&mut rng, rho, 1 + i % 2, 256, cot_floor(rho), 0.4);
        let r = c.rho();
        let lo = r.iter().copied().fold(f64::NEG_INFINITY, f64::max) - PI;
        let hi = r.iter().copied().fold(f64::INFINITY, f64::min);
        let theta = lo + (hi - lo) * rng.random_range(0.1..0.9);
        let ct = translate_curve(&c, theta).unwrap();
        for (a, b) in r.iter().zip(ct.rho()) {
            drho = drho.max((a - theta - b).abs());
        }
        let back = translate_curve(&ct, -theta).unwrap();
        for i in 0..c.n() {
            dinv = dinv.max((back.v()[i] - c.v()[i]).abs()).max((back.kappa()[i] - c.kappa()[i]).abs());
        }
        dinv = dinv.max(back.q0().distance(c.q0()));
        // γ_θ = cos θ γ + sin θ n at every node
        let (f, ft) = (integrate_frames(&c), integrate_frames(&ct));
        for (a, b) in f.frames.iter().zip(&ft.frames) {
            let want = a.col(0) * theta.cos() + a.col(2) * theta.sin();
            dpos = dpos.max((b.col(0) - want).norm());
        }
    }
    let el = start.elapsed();
    ok(
        drho < 1e-9 && dinv < 1e-9 && dpos < 1e-9 && el < Duration::from_secs(5),
        format!("|rho_bar-(rho-theta)| {drho:.2e}, inverse {dinv:.2e}, positions {dpos:.2e} in {el:?}"),
    )
}

fn c7_total_curvature() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = ClassifyOptions::default();
    let (mut checked, mut min_slack, mut failures) = (0, f64::INFINITY, 0);
    for i in 0..200 {
        let k0 = if i % 2 == 0 { 0.0 } else { 0.5 };
        let rho0 = arccot(k0);
        let rho = rng.random_range(0.25..0.8) * rho0;
        let c = random_perturbed_circle(&mut rng, rho, 1 + i % 4, 256, k0, 0.6);
        match total_curvature_bound_check(&c, CurvatureBound::new(k0).unwrap(), &opts) {
            Ok(r) => {
                checked += 1;
                min_slack = min_slack.min(r.slack);
                if !r.satisfied {
                    failures += 1;
                }
            }
            Err(ClassifyError::NotApplicable(_)) => {}
            Err(_) => failures += 1,
        }
    }
    let el = start.elapsed();
    ok(
        checked == 200 && failures == 0 && el < Duration::from_secs(20),
        format!("{checked}/200 non-diffuse checked, {failures} violations, min slack {min_slack:.4} in {el:?}"),
    )
}

fn c8_band_crossing() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let s = SpaceSpec::symmetric(1.0).unwrap();
    let bound = PI - s.width();
    let (mut done, mut attempts) = (0, 0);
    let (mut worst_margin, mut merid_err) = (f64::INFINITY, 0.0f64);
    let mut pass = true;
    while done < 20 && attempts < 200 {
        attempts += 1;
        let modes: Vec<Mode> = common::random_modes(&mut rng, 3, 0.6);
        let c = perturbed_circle(PI / 2.0, 1, 256, &modes).unwrap();
        if !check_membership(&c, &s, 1e-9).member {
            continue;
        }
        let fc = integrate_frames(&c);
        let b = regular_band(&fc, &s, 32).unwrap();
        let Ok(rep) = band_self_intersections(&b, 0.9 * b.max_cell_diameter()) else { continue };
        if rep.class == BandSimplicity::Neither {
            continue;
        }
        done += 1;
        let h = b.max_cell_diameter();
        // straight paths between all boundary sample pairs
        let (lo, hi) = (b.row(0), b.row(b.m()));
        let d = lo
            .iter()
            .flat_map(|p| hi.iter().map(move |q| p.distance(q)))
            .fold(f64::INFINITY, f64::min);
        worst_margin = worst_margin.min(d - (bound - 2.0 * h));
        // random wandering paths through the band
        let (a, z) = (s.rho1() - PI, s.rho2());
        for _ in 0..20 {
            let t0 = rng.random_range(0.0..1.0);
            let drift = rng.random_range(-0.3..0.3);
            let wob = rng.random_range(0.0..0.05);
            let path: Vec<UnitVec3> = (0..200)
                .map(|k| {
                    let u = k as f64 / 199.0;
                    let t = (t0 + drift * u + wob * (6.0 * PI * u).sin()).rem_euclid(1.0);
                    band_point(&fc, t, a + (z - a) * u)
                })
                .collect();
            let len = min_crossing_length(&b, &path, 1e-3).unwrap();
            worst_margin = worst_margin.min(len - (bound - 2.0 * h));
        }
        for _ in 0..5 {
            let m = meridian_path(&fc, &s, rng.random_range(0.0..1.0), 100);
            merid_err = merid_err.max((min_crossing_length(&b, &m, 1e-3).unwrap() - bound).abs());
        }
    }
    pass &= done == 20 && worst_margin >= 0.0 && merid_err < 1e-6;
    let el = start.elapsed();
    ok(
        pass && el < Duration::from_secs(10),
        format!("{done} quasi-simple curves, min(length - bound) {worst_margin:.4}, meridian error {merid_err:.2e} in {el:?}"),
    )
}

fn c9_grafting() -> Outcome {
    let start = Instant::now();
    let c = perturbed_circle(0.3, 1, 128, &[Mode::new(2, 0.3, 0.1), Mode::new(3, 0.2, 0.7)]).unwrap();
    let fc = integrate_frames(&c);
    let p = find_antipodal_pair(&c, 2.4).unwrap();
    let s = 4.0 * PI;
    let g = graft_antipodal(&c, p.t1, p.t2, p.rho_a, p.rho_b, s).unwrap();
    let fg = integrate_frames(&g);
    let close_a = fg.closure_defect(&Rotation::identity()).max(fg.last_lift().distance(fc.last_lift()));
    let dtot_a = (total_curvature(&g) - total_curvature(&c) - 2.0 * s).abs();

    let c2 = perturbed_circle(0.3, 1, 96, &[Mode::new(2, 0.2, 0.4), Mode::new(3, 0.1, 0.0)]).unwrap();
    let fc2 = integrate_frames(&c2);
    let n = c2.n() as f64;
    let far = 0.3 + (-1.0f64 / 3.0).acos();
    let q = graft_quadruple(&c2, [0.0, 16.0 / n, 32.0 / n, 64.0 / n], [far, 0.3, far, far], 0.1).unwrap();
    let fq = integrate_frames(&q.curve);
    let close_q = fq.closure_defect(&Rotation::identity()).max(fq.last_lift().distance(fc2.last_lift()));
    let dtot_q = (total_curvature(&q.curve) - total_curvature(&c2) - 0.1).abs();
    let el = start.elapsed();
    let pass = close_a < 1e-8 && dtot_a < 1e-8 && close_q < 1e-8 && dtot_q < 1e-8 && q.residual < 1e-10 && el < Duration::from_secs(5);
    ok(
        pass,
        format!(
            "antipodal s=4pi: closure {close_a:.1e}, |dtot-2s| {dtot_a:.1e}; quadruple s=0.1: closure {close_q:.1e}, |dtot-s| {dtot_q:.1e}, residual {:.1e} in {el:?}",
            q.residual
        ),
    )
}

fn c10_convexity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let dirs: Vec<Vec3> = (0..100_000).map(|_| random_unit(&mut rng).vec()).collect();
    let (mut agree, mut ambiguous, mut disagree, mut recon) = (0, 0, 0, 0.0f64);
    for trial in 0..500 {
        let n = 1 + trial % 50;
        let bias = [0.0, 0.3, 0.8][trial % 3];
        let pts: Vec<Vec3> = (0..n).map(|_| (random_unit(&mut rng).vec() + Vec3::z() * bias).normalize()).collect();
        let cloud = PointCloud3::new(pts.clone()).unwrap();
        let loc = locate_origin(&cloud, DEFAULT_BOUNDARY_TOL);
        let hemisphere_found = dirs.iter().any(|h| pts.iter().all(|p| p.dot(h) >= 0.0));
        let interior = loc.tag == OriginTag::Interior;
        if interior {
            let s = steinitz_simplex(&cloud, &Vec3::zeros()).unwrap();
            recon = recon.max(s.combination().norm());
        }
        if interior != hemisphere_found {
            agree += 1;
        } else if loc.margin.abs() < 0.02 {
            // thinner than the oracle lattice resolves
            ambiguous += 1;
        } else {
            disagree += 1;
        }
    }
    let el = start.elapsed();
    ok(
        disagree == 0 && recon < 1e-9 && el < Duration::from_secs(30),
        format!("{agree} agree, {ambiguous} below oracle resolution, {disagree} disagree; steinitz error {recon:.1e} in {el:?}"),
    )
}

fn hodograph_winding(coef: &[(i32, f64, f64)], samples: usize) -> Option<i64> {
    // z(t) = Σ (a + ib) e^{ift}; z'(t) = Σ if(a + ib) e^{ift}
    let deriv = |t: f64| {
        coef.iter().fold((0.0, 0.0), |(x, y), &(f, a, b)| {
            let (c, s) = ((f as f64 * t).cos(), (f as f64 * t).sin());
            let (re, im) = (a * c - b * s, a * s + b * c);
            (x - f as f64 * im, y + f as f64 * re)
        })
    };
    let w: Vec<(f64, f64)> = (0..samples).map(|k| deriv(2.0 * PI * k as f64 / samples as f64)).collect();
    let norms: Vec<f64> = w.iter().map(|(x, y)| x.hypot(*y)).collect();
    let (lo, hi) = norms.iter().fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(*x), b.max(*x)));
    if lo < 0.15 * hi {
        return None;
    }
    // signed crossings of the positive real axis
    let mut count = 0i64;
    for k in 0..samples {
        let (a, b) = (w[k], w[(k + 1) % samples]);
        if (a.1 < 0.0) != (b.1 < 0.0) {
            let x = a.0 + (b.0 - a.0) * (-a.1) / (b.1 - a.1);
            if x > 0.0 {
                count += if b.1 >= 0.0 { 1 } else { -1 };
            }
        }
    }
    Some(count)
}

fn c11_rotation_numbers() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = ClassifyOptions::default();
    let (mut fixtures, mut nu_disagree) = (0, 0);
    let mut attempts = 0;
    while fixtures < 50 && attempts < 200 {
        attempts += 1;
        let k0 = [0.0, 0.5, -0.3][attempts % 3];
        let rho0 = arccot(k0);
        let rho = rng.random_range(0.3..0.7) * rho0.min(PI / 2.0);
        let k = 1 + attempts % 5;
        let c = random_perturbed_circle(&mut rng, rho, k, 256, k0, 0.5);
        let kb = CurvatureBound::new(k0).unwrap();
        if !is_condensed(&c, kb, opts.m).unwrap().condensed || is_diffuse(&c, kb, opts.m).unwrap().diffuse {
            continue;
        }
        fixtures += 1;
        match rotation_number(&c, kb, NuMode::Auto, &opts) {
            Ok(r) if r.condensed_nu.is_some() && r.condensed_nu == r.sheet_nu => {}
            other => {
                eprintln!("k0={k0} rho={rho:.3} k={k}: {other:?}");
                nu_disagree += 1;
            }
        }
    }
    let (mut plane_checked, mut plane_disagree) = (0, 0);
    while plane_checked < 100 {
        let coef: Vec<(i32, f64, f64)> = (0..3)
            .map(|_| {
                let f = loop {
                    let f = rng.random_range(-4..=4);
                    if f != 0 {
                        break f;
                    }
                };
                (f, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            })
            .collect();
        let Some(want) = hodograph_winding(&coef, 20_000) else { continue };
        let pts: Vec<(f64, f64)> = (0..2000)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 2000.0;
                coef.iter().fold((0.0, 0.0), |(x, y), &(f, a, b)| {
                    let (c, s) = ((f as f64 * t).cos(), (f as f64 * t).sin());
                    (x + a * c - b * s, y + a * s + b * c)
                })
            })
            .collect();
        plane_checked += 1;
        if plane_rotation_number(&pts).map(|r| r.number).ok() != Some(want) {
            plane_disagree += 1;
        }
    }
    let el = start.elapsed();
    ok(
        fixtures == 50 && nu_disagree == 0 && plane_disagree == 0 && el < Duration::from_secs(20),
        format!("{fixtures} fixtures, {nu_disagree} nu mismatches; {plane_checked} plane curves, {plane_disagree} mismatches in {el:?}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("component counts", c1_component_counts),
        ("circles in L0", c2_little),
        ("stabilization threshold", c3_stabilization),
        ("bending obstruction", c4_bending),
        ("frame and lift fidelity", c5_frames),
        ("translation laws", c6_translation),
        ("total-curvature bound", c7_total_curvature),
        ("band-crossing length", c8_band_crossing),
        ("grafting", c9_grafting),
        ("convexity oracle", c10_convexity),
        ("rotation-number agreement", c11_rotation_numbers),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let r = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            ok(false, format!("panicked: {msg}"))
        });
        if !r.pass {
            failed += 1;
        }
        println!("criterion {:>2} {:<26} {}  {}", i + 1, name, if r.pass { "PASS" } else { "FAIL" }, r.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
