//! Acceptance battery. Prints one line per criterion and exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use sharpcert::deficit::fd_battery;
use sharpcert::penrose::{conformal_fd_residual, omega0_identity_residual, MinkowskiRadialPoint};
use sharpcert::report::round_up;
use sharpcert::schrod::{
    cm_certificate, cm_jacobi, cm_quad, cm_sum, lens_model_check, strichartz_constant, LensGrid,
};
use sharpcert::sphere::{
    bk_upper, emit_tables, gap_certificate, kernel_psd_min_eig, remarkable_identity_residual,
    tomas_stein_constant, KSplit, DEFAULT_BK_HORIZON, DEFAULT_R,
};
use sharpcert::wave::{c_sharp_scan, gamma_identity_residual, wave_audit};
use sharpcert::{SchrodParams, SphereParams, Verdict, WaveParams};

const TABLE1: &str = include_str!("data/reference_table1.csv");
const TABLE2: &str = include_str!("data/reference_table2.csv");

type Outcome = Result<String, String>;

fn rows(csv: &str) -> Vec<Vec<&str>> {
    csv.lines().skip(1).map(|l| l.split(',').collect()).collect()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1_table1_c0() -> Outcome {
    let t = emit_tables(2, 60, DEFAULT_R, 1e-9).map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    let mut worst = 0.0_f64;
    for (row, ours) in rows(TABLE1).iter().zip(&t.table1.rows) {
        let v: f64 = row[3].parse().unwrap();
        let c = ours.c0_numeric;
        worst = worst.max(c - v);
        if !(c >= v && c <= v + 2e-5) {
            bad.push(format!("d={} ({c} vs {v})", ours.d));
        }
    }
    check(
        bad.is_empty() && t.table1.rows.len() == 59,
        format!("59 dimensions, max offset {worst:.2e}; outside: {bad:?}"),
    )
}

fn c2_table1_thresholds() -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    for row in rows(TABLE1) {
        if row[1].is_empty() {
            continue;
        }
        let d: u32 = row[0].parse().unwrap();
        let k: u32 = row[2].parse().unwrap();
        let want: f64 = row[1].parse().unwrap();
        let params = SphereParams::new(d).unwrap();
        let got = round_up((params.p - 1.0) * bk_upper(&params, k), 5);
        n += 1;
        if (got - want).abs() > 1e-12 {
            bad.push(format!("d={d} k={k}: {got} vs {want}"));
        }
    }
    check(bad.is_empty(), format!("{n} thresholds; mismatches: {bad:?}"))
}

fn c3_table2_cells() -> Outcome {
    let t = emit_tables(2, 60, DEFAULT_R, 1e-9).map_err(|e| e.to_string())?;
    let reference = rows(TABLE2);
    if reference.len() != t.table2.rows.len() {
        return Err(format!("{} cells vs {}", t.table2.rows.len(), reference.len()));
    }
    let mut bad = Vec::new();
    for (row, ours) in reference.iter().zip(&t.table2.rows) {
        let want: f64 = row[2].parse().unwrap();
        if (ours.pm1_ck_upper - want).abs() > 1e-12 {
            bad.push(format!("(d={}, k={}): {} vs {}", ours.d, ours.k, ours.pm1_ck_upper, want));
        }
    }
    check(
        bad.is_empty(),
        format!("{} cells, {} mismatched {:?}", reference.len(), bad.len(), bad),
    )
}

fn c4_gap_certificates() -> Outcome {
    let mut bad = Vec::new();
    for d in 2..=60 {
        let params = SphereParams::new(d).unwrap();
        let c = gap_certificate(&params, KSplit::standard(d), DEFAULT_R, 1e-9, DEFAULT_BK_HORIZON)
            .map_err(|e| e.to_string())?;
        let flag_ok = if d == 2 {
            !c.report.flags.is_empty()
        } else {
            c.report.flags.is_empty()
        };
        if c.report.verdict != Verdict::Pass || !flag_ok {
            bad.push(format!("d={d}: {} {:?}", c.report.verdict, c.report.flags));
        }
    }
    check(bad.is_empty(), format!("d=2..60 PASS, d=2 flagged; problems: {bad:?}"))
}

fn c5_identity() -> Outcome {
    let mut worst = 0.0_f64;
    let mut bad = Vec::new();
    for d in 2..=10 {
        let params = SphereParams::new(d).unwrap();
        let r = remarkable_identity_residual(&params, DEFAULT_R, 1e-10).map_err(|e| e.to_string())?;
        worst = worst.max(r.residual / r.err_bound);
        if r.residual > r.err_bound {
            bad.push(format!("d={d}: {:.2e} > {:.2e}", r.residual, r.err_bound));
        }
    }
    check(bad.is_empty(), format!("max residual/err ratio {worst:.3}; {bad:?}"))
}

fn c6_tomas_stein() -> Outcome {
    let v = tomas_stein_constant(&SphereParams::new(3).unwrap(), 1e-10).map_err(|e| e.to_string())?;
    let gap = (v.value - 2.0 * PI).abs();
    check(gap <= 1e-4, format!("value {:.8}, |v - 2pi| = {gap:.2e}", v.value))
}

fn c7_schrodinger() -> Outcome {
    let mut notes = Vec::new();
    let c1 = (1..=64)
        .map(|d| (cm_sum(&SchrodParams::new(d).unwrap(), 1) - 1.0).abs())
        .fold(0.0, f64::max);
    notes.push(format!("max|c1-1|={c1:.1e}"));
    let mut spread = 0.0_f64;
    for d in [1, 3, 4, 5] {
        let s = SchrodParams::new(d).unwrap();
        for m in 0..=10 {
            let a = cm_sum(&s, m);
            let b = cm_jacobi(&s, m).map_err(|e| e.to_string())?;
            let q = cm_quad(&s, m, 1e-11).map_err(|e| e.to_string())?.value;
            spread = spread.max((a - b).abs()).max((a - q).abs()).max((b - q).abs());
        }
    }
    notes.push(format!("method spread {spread:.1e}"));
    let mut all_below = true;
    for d in 1..=20 {
        let c = cm_certificate(d, 500, 1e-9).map_err(|e| e.to_string())?;
        let below = c.per_m.iter().skip(2).all(|e| e.cm < 1.0);
        all_below &= below;
        if c.verdict != Verdict::Pass {
            notes.push(format!("d={d} certificate {} {:?}", c.verdict, c.report.flags));
        }
    }
    let a2 = (strichartz_constant(2).unwrap().value - 0.5f64.sqrt()).abs();
    notes.push(format!("|A2 - 2^-1/2|={a2:.1e}"));
    check(c1 <= 1e-12 && spread <= 1e-8 && all_below && a2 <= 1e-12, notes.join(", "))
}

fn c8_lens() -> Outcome {
    let l = lens_model_check(1, 5, LensGrid::for_modes(5), 1e-14).map_err(|e| e.to_string())?;
    let worst = l.hessian_ratios.iter().map(|(_, r)| (r - 1.0).abs()).fold(0.0, f64::max);
    let grad_ok = l.gradient_norm <= 1e-6 * l.model_scale;
    check(
        worst <= 1e-3 && grad_ok && l.hessian_ratios.len() == 4,
        format!(
            "max |ratio-1| {worst:.1e} over m=2..5, gradient {:.1e} (scale {:.3})",
            l.gradient_norm, l.model_scale
        ),
    )
}

fn c9_wave() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(9);
    let gmax = (0..200)
        .map(|_| gamma_identity_residual(rng.gen_range(2.0..=6.0f64).max(2.0 + 1e-9)).unwrap())
        .fold(0.0, f64::max);
    let mut argmax_bad = Vec::new();
    for d in (5..=61).step_by(2) {
        let s = c_sharp_scan(&WaveParams::new(d).unwrap(), 1000).map_err(|e| e.to_string())?;
        if s.argmax_h != 1 {
            argmax_bad.push(d);
        }
    }
    let a3 = wave_audit(3, 500, 1000, 1e-10).map_err(|e| e.to_string())?;
    let sup_ok = (a3.sup_ratio - 4.0 / 3.0).abs() <= 1e-12 && (a3.rho - 2.0 / 3.0).abs() <= 1e-12;
    let a5 = wave_audit(5, 200, 1000, 1e-10).map_err(|e| e.to_string())?;
    let json = serde_json::to_value(&a5).unwrap();
    let block = &json["discrepancy"];
    let block_ok = block.get("c_sharp_h1").is_some() && block.get("c_h_one").is_some();
    check(
        gmax <= 1e-12 && argmax_bad.is_empty() && sup_ok && block_ok,
        format!(
            "gamma residual {gmax:.1e}, argmax!=1 at {argmax_bad:?}, d=3 sup {} rho {}, C(1) d=5: {} vs {}",
            a3.sup_ratio, a3.rho, a5.discrepancy.c_sharp_h1, a5.discrepancy.c_h_one
        ),
    )
}

fn c10_deficit() -> Outcome {
    let b = fd_battery(24, 8, 10).map_err(|e| e.to_string())?;
    check(
        b.models >= 20 && b.min_first_order >= 1.8 && b.min_second_order >= 1.8 && b.max_coupling_ratio <= 1e-14,
        format!(
            "{} models, orders {:.3}/{:.3}, coupling ratio {:.1e}",
            b.models, b.min_first_order, b.min_second_order, b.max_coupling_ratio
        ),
    )
}

fn c11_penrose() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let mut conf = 0.0_f64;
    for _ in 0..100 {
        let pt = MinkowskiRadialPoint::new(rng.gen_range(-5.0..5.0), rng.gen_range(0.01..5.0)).unwrap();
        conf = conf.max(conformal_fd_residual(pt, 1e-5).map_err(|e| e.to_string())?);
    }
    let om = (0..=1_000_000)
        .map(|i| omega0_identity_residual(i as f64 * 1e-3))
        .fold(0.0, f64::max);
    check(
        conf <= 1e-6 && om <= 1e-12,
        format!("conformality {conf:.1e}, omega0 identity {om:.1e}"),
    )
}

fn c12_kernel_psd() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(12);
    let mut pts: Vec<f64> = (0..50).map(|_| rng.gen_range(0.05..4.0)).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut bad = Vec::new();
    let mut worst = 0.0_f64;
    for d in [3, 5] {
        for k in [1, 2, 3] {
            for t in [0.0, 0.5, 2.0] {
                let s = kernel_psd_min_eig(&SphereParams::new(d).unwrap(), k, t, &pts, 1e-12)
                    .map_err(|e| e.to_string())?;
                let rel = s.min_eig / s.frobenius_norm;
                worst = worst.min(rel);
                if s.min_eig < -1e-10 * s.frobenius_norm {
                    bad.push(format!("(d={d},k={k},t={t}) {rel:.1e}"));
                }
            }
        }
    }
    check(
        bad.is_empty(),
        format!("worst min_eig/norm {worst:.1e}; negative: {}", bad.join(" ")),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("table 1 c0 reproduction", c1_table1_c0),
        ("table 1 (p-1)b_k thresholds", c2_table1_thresholds),
        ("table 2 cell reproduction", c3_table2_cells),
        ("sphere gap certificates", c4_gap_certificates),
        ("c0 = (p-1)c1 identity", c5_identity),
        ("Tomas-Stein constant d=3", c6_tomas_stein),
        ("Schrodinger coefficients", c7_schrodinger),
        ("Lens-model second variation", c8_lens),
        ("wave constants", c9_wave),
        ("deficit variations", c10_deficit),
        ("Penrose geometry", c11_penrose),
        ("kernel PSD battery", c12_kernel_psd),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {tag} {name} [{:.1}s]: {detail}",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 12 criteria pass", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
