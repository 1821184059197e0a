//! Executable property suite behind the `verify` command.

use nalgebra::Matrix4;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::codebook::{
    codebook, Codebook, CoeffVec, GateId, CORNERS, CORNER_TO_POLY, NUM_GATES, POLY_TO_CORNER,
};
use crate::diagnostics::{entropy, gate_entropy};
use crate::exec::Exec;
use crate::netarch::{forward, Batch, Method, Mode, NetworkConfig, WiringScheme};
use crate::rng::{stream, Purpose};
use crate::trainers::{
    basis_metrics, covjac_effective, covjac_jacobian, gumbel_st_forward, input_grad, mix_coeffs, softmax,
    ste_backward, BasisSpec, Model, Weights,
};

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn result(name: &'static str, passed: bool, detail: impl Into<String>) -> PropertyResult {
    PropertyResult {
        name,
        passed,
        detail: detail.into(),
    }
}

/// A codebook with the sign of AND's interaction coefficient flipped.
pub fn sign_flipped_codebook() -> Codebook {
    let mut rows = *codebook().rows();
    rows[GateId::AND.index()][3] = -rows[GateId::AND.index()][3];
    Codebook::from_rows(rows)
}

/// Structural checks of `cb` in exact integer arithmetic.
pub fn codebook_properties(cb: &Codebook) -> Vec<PropertyResult> {
    let rows = cb.rows();
    let mut out = Vec::new();

    out.push(result("codebook has rank 4", cb.rank() == 4, format!("rank {}", cb.rank())));

    let s = cb.column_sums();
    out.push(result(
        "linear and interaction columns sum to zero",
        s[1] == 0 && s[2] == 0 && s[3] == 0,
        format!("column sums {s:?}"),
    ));

    let in_range = rows.iter().all(|r| {
        (0..=1).contains(&r[0]) && (-1..=1).contains(&r[1]) && (-1..=1).contains(&r[2]) && (-2..=2).contains(&r[3])
    });
    out.push(result("coefficients lie in their integer ranges", in_range, ""));

    let bad: Vec<usize> = (0..NUM_GATES).filter(|&j| !cb.row_reproduces_truth_table(j)).collect();
    out.push(result(
        "every row reproduces its truth table at the four corners",
        bad.is_empty(),
        format!("failing rows {bad:?}"),
    ));

    let mut mismatch = 0;
    for g in GateId::all() {
        let (r, c) = (rows[g.index()], rows[g.complement().index()]);
        if c != [1 - r[0], -r[1], -r[2], -r[3]] || g.complement().complement() != g {
            mismatch += 1;
        }
    }
    out.push(result(
        "complement maps c0 to 1-c0 and negates the other coefficients",
        mismatch == 0,
        format!("{mismatch} mismatched gates"),
    ));

    let mut count = 0;
    let mut weak = Vec::new();
    for (j, r) in rows.iter().enumerate() {
        for (input, lin, inter) in [(0, r[1], r[3]), (1, r[2], r[3])] {
            if (lin, inter) == (0, 0) {
                continue;
            }
            if input == 0 {
                count += 1;
            }
            let m = (0..=1).map(|b| (lin as i32 + inter as i32 * b).abs()).max().unwrap_or(0);
            if m < 1 {
                weak.push(j);
            }
        }
    }
    out.push(result(
        "input-dependent gates have a unit input derivative at some corner",
        weak.is_empty() && count == 12,
        format!("{count} a-dependent gates, weak rows {weak:?}"),
    ));

    let idempotent = (0..NUM_GATES).all(|j| cb.nearest(&cb.row_f64(j)) == j);
    out.push(result("snap is idempotent on codebook rows", idempotent, ""));
    out
}

fn fixed_properties() -> Vec<PropertyResult> {
    let mut out = Vec::new();

    let mut prod_ok = true;
    for i in 0..4 {
        for j in 0..4 {
            let v: i32 = (0..4).map(|k| CORNER_TO_POLY[i][k] as i32 * POLY_TO_CORNER[k][j] as i32).sum();
            prod_ok &= v == i32::from(i == j);
        }
    }
    out.push(result("corner and polynomial maps are mutual inverses", prod_ok, ""));

    let mut sizes = [0usize; 4];
    for g in GateId::all() {
        sizes[g.class().index()] += 1;
    }
    out.push(result("gate classes partition as 2/4/8/2", sizes == [2, 4, 8, 2], format!("{sizes:?}")));

    let mut rng = stream(0, Purpose::Test, 100);
    let mut stable = true;
    for _ in 0..1000 {
        let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-2.5..2.5));
        let d = codebook().distances2(&c);
        let j = codebook().nearest(&c);
        let second = (0..NUM_GATES).filter(|&i| i != j).map(|i| d[i].sqrt()).fold(f64::INFINITY, f64::min);
        let margin = (second - d[j].sqrt()) / 2.0;
        let dir: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        let p: [f64; 4] = std::array::from_fn(|k| c[k] + 0.99 * margin * dir[k] / n);
        stable &= codebook().nearest(&p) == j;
    }
    out.push(result("snap is stable under perturbations below half the margin", stable, "1000 random points"));

    let u = [1.0 / 16.0; 16];
    let c = mix_coeffs(&u);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a, b) = (rng.random::<f64>(), rng.random::<f64>());
        let (da, db) = input_grad(&c, a, b);
        worst = worst.max(da.abs()).max(db.abs());
    }
    out.push(result(
        "soft-mix input gradient vanishes at uniform weights (exact to machine precision)",
        worst < 1e-12,
        format!("max |dz/da|, |dz/db| = {worst:.3e}"),
    ));

    let mut violations = 0;
    for _ in 0..10_000 {
        let scale = rng.random_range(0.0..3.0);
        let l: Weights = std::array::from_fn(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            scale * z
        });
        let pi = softmax(&l);
        let b = rng.random_range(0..2) as f64;
        let (da, _) = input_grad(&mix_coeffs(&pi), rng.random(), b);
        let l1: f64 = pi.iter().map(|p| (p - 1.0 / 16.0).abs()).sum();
        if da.abs() > l1 + 1e-9 {
            violations += 1;
        }
    }
    out.push(result(
        "soft-mix input gradient is bounded by the l1 distance to uniform",
        violations == 0,
        format!("{violations} violations in 10000 draws"),
    ));

    out.extend(covjac_properties());

    let n = 4096;
    let (mut g0, mut g3, mut active) = (0.0, 0.0, 0usize);
    let c = CoeffVec::from(GateId::AND.coeffs());
    for _ in 0..n {
        let (a, b) = (rng.random_range(0..2) as f64, rng.random_range(0..2) as f64);
        let (g, _) = ste_backward(&c, BasisSpec::Canonical, a, b, 1.0);
        g0 += g[0];
        g3 += g[3];
        active += g.iter().filter(|x| **x != 0.0).count();
    }
    let ratio = g3 / g0;
    out.push(result(
        "straight-through interaction coverage is one quarter",
        (ratio - 0.25).abs() <= 0.02,
        format!("|grad cab| / |grad c0| = {ratio:.4} at batch {n}"),
    ));
    let mean_active = active as f64 / n as f64;
    let corner_active = CORNERS
        .iter()
        .all(|&(a, b)| crate::codebook::phi(a as f64, b as f64).iter().filter(|x| **x != 0.0).count() == 1);
    out.push(result(
        "monomial basis activates 2.25 terms on average, corner basis exactly 1",
        (mean_active - 2.25).abs() <= 0.02 && corner_active,
        format!("mean active monomials {mean_active:.4}"),
    ));

    let draws = 100_000;
    let mut total = 0.0;
    for _ in 0..draws {
        let l: Weights = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        total += softmax(&l).iter().map(|p| (p - 1.0 / 16.0).abs()).sum::<f64>();
    }
    let mean_l1 = total / draws as f64;
    out.push(result(
        "softmax of unit-variance logits sits about 0.72 from uniform in l1",
        (mean_l1 - 0.72).abs() <= 0.02,
        format!("E|pi - u|_1 = {mean_l1:.4}"),
    ));

    out.extend(basis_properties());

    let mut counts = [0usize; 16];
    for _ in 0..10_000 {
        counts[gumbel_st_forward(&[0.0; 16], &mut rng).0.index()] += 1;
    }
    let worst = counts.iter().map(|&c| (c as f64 / 1e4 - 1.0 / 16.0).abs()).fold(0.0, f64::max);
    out.push(result(
        "gumbel-max selects each gate with frequency 1/16 under equal logits",
        worst <= 0.01,
        format!("max deviation {worst:.4}"),
    ));

    let ln16 = 16f64.ln();
    let mut ok = (entropy(&u) - ln16).abs() < 1e-12;
    for _ in 0..1000 {
        let l: Weights = std::array::from_fn(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            2.0 * z
        });
        let h = gate_entropy(&[softmax(&l)]);
        ok &= (0.0..=ln16 + 1e-12).contains(&h);
    }
    out.push(result("gate entropy lies in [0, ln 16] and uniform attains ln 16", ok, ""));

    out.push(zero_gap_property());
    out
}

fn covjac_properties() -> Vec<PropertyResult> {
    let mut rng = stream(0, Purpose::Test, 101);
    let (mut fd_err, mut asym, mut min_eig, mut min_diag) = (0.0f64, 0.0f64, f64::INFINITY, f64::INFINITY);
    for &tau in &[0.5, 1.0, 2.0] {
        for _ in 0..100 {
            let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.5..2.0));
            let (w, _) = covjac_effective(&c, tau);
            let j = covjac_jacobian(&w, tau);
            let h = 1e-4;
            let scale = j.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-12);
            for q in 0..4 {
                let mut p = c;
                let mut m = c;
                p[q] += h;
                m[q] -= h;
                let (sp, sm) = (covjac_effective(&p, tau).1, covjac_effective(&m, tau).1);
                for r in 0..4 {
                    let fd = (sp[r] - sm[r]) / (2.0 * h);
                    fd_err = fd_err.max((fd - j[r][q]).abs() / scale);
                }
            }
            for p in 0..4 {
                min_diag = min_diag.min(j[p][p]);
                for q in 0..4 {
                    asym = asym.max((j[p][q] - j[q][p]).abs());
                }
            }
            let m = Matrix4::from_fn(|p, q| j[p][q]);
            min_eig = min_eig.min(m.symmetric_eigenvalues().min());
        }
    }
    vec![
        result(
            "covariance jacobian matches central finite differences",
            fd_err <= 1e-5,
            format!("max relative error {fd_err:.3e}"),
        ),
        result("covariance jacobian is symmetric", asym < 1e-10, format!("max asymmetry {asym:.3e}")),
        result(
            "covariance jacobian is positive semidefinite",
            min_eig >= -1e-8,
            format!("min eigenvalue {min_eig:.3e}"),
        ),
        result(
            "covariance jacobian has a positive diagonal",
            min_diag > 0.0,
            format!("min diagonal {min_diag:.3e}"),
        ),
    ]
}

fn basis_properties() -> Vec<PropertyResult> {
    let mut out = Vec::new();
    let m = basis_metrics(BasisSpec::Canonical).expect("non-degenerate");
    out.push(result(
        "canonical backward basis has coverage 1/4, coherence 1, bias 0",
        (m.coverage, m.coherence, m.bias) == (0.25, 1.0, 0.0),
        format!("{m:?}"),
    ));
    let m = basis_metrics(BasisSpec::Walsh).expect("non-degenerate");
    out.push(result(
        "walsh backward basis has full coverage, zero coherence, positive bias",
        m.coverage == 1.0 && m.coherence.abs() < 1e-12 && m.bias > 0.0,
        format!("{m:?}"),
    ));
    let m = basis_metrics(BasisSpec::Smoothed(0.2)).expect("non-degenerate");
    out.push(result(
        "smoothed backward basis has full coverage, coherence 1, positive bias",
        m.coverage == 1.0 && (m.coherence - 1.0).abs() < 1e-12 && m.bias > 0.0,
        format!("{m:?}"),
    ));
    let mut hits = 0;
    for i in 0..100 {
        for k in 0..100 {
            let alpha = -2.0 + 4.0 * i as f64 / 99.0;
            let beta = -2.0 + 4.0 * k as f64 / 99.0;
            let m = basis_metrics(BasisSpec::Affine { alpha, beta }).expect("beta != 0 on this grid");
            if m.coverage == 1.0 && (m.coherence - 1.0).abs() < 1e-12 && m.bias < 1e-12 {
                hits += 1;
            }
        }
    }
    out.push(result(
        "no affine backward basis attains full coverage, coherence 1 and zero bias",
        hits == 0,
        format!("{hits} of 10000 grid points"),
    ));
    out
}

fn zero_gap_property() -> PropertyResult {
    let mut rng = stream(0, Purpose::Test, 102);
    let mut mismatches = 0;
    for t in 0..10 {
        let depth = rng.random_range(1..=4);
        let classes = rng.random_range(1..=4);
        let width = classes * rng.random_range(2..=16);
        let dim = rng.random_range(2..=20);
        let mut cfg = NetworkConfig::new(dim, depth, width, classes, Method::MultilinearSte);
        cfg.wiring_scheme = WiringScheme::Random;
        cfg.seed = t;
        cfg.init_sigma = 1.5;
        let model = Model::init(cfg, t).expect("valid config");
        let rows = 64;
        let features = (0..rows * dim).map(|_| rng.random_range(0..2) as f32).collect();
        let batch = Batch {
            dim,
            features,
            labels: vec![0; rows],
        };
        let (ta, _) = forward(&model, &batch, Mode::Train, Exec::Sequential).expect("shapes match");
        let (ha, _) = forward(&model, &batch, Mode::Hard, Exec::Sequential).expect("shapes match");
        if ta != ha {
            mismatches += 1;
        }
    }
    result(
        "straight-through training forward equals the hard circuit",
        mismatches == 0,
        format!("{mismatches} of 10 random networks differ"),
    )
}

/// Every property, with codebook structure checked against `cb`.
pub fn run_all(cb: &Codebook) -> Vec<PropertyResult> {
    let mut out = codebook_properties(cb);
    out.extend(fixed_properties());
    out
}
