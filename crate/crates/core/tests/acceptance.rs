//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if a criterion fails that is not listed in `KNOWN_DEVIATIONS`.

use std::f64::consts::TAU;
use std::time::Instant;

use contactflow::forms::darboux_matrix;
use contactflow::linalg::numerical_rank;
use contactflow::models::hodge_star;
use contactflow::*;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria expected to fail, with the reason checked in `criterion_10`.
const KNOWN_DEVIATIONS: &[usize] = &[10];

const PER: BoundaryCondition = BoundaryCondition::Periodic;

struct Check {
    label: String,
    ok: bool,
    detail: String,
}

#[derive(Default)]
struct Outcome {
    checks: Vec<Check>,
}

impl Outcome {
    fn check(&mut self, label: &str, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            label: label.into(),
            ok,
            detail: detail.into(),
        });
    }

    fn below(&mut self, label: &str, value: f64, bound: f64) {
        self.check(label, value < bound, format!("{value:.3e} < {bound:.0e}"));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

fn rk4(m: &ModelBundle, x0: &StatePoint, dt: f64, t: f64) -> Trajectory {
    let f = m.flow_field().expect("flow field");
    rk4_integrate(|x| f.eval(x), x0, dt, t, &m.hamiltonian).expect("integration")
}

fn max_over<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

/// `q' = p`, `p' = (q_{i+1} - 2 q_i + q_{i-1}) / dx^2 - kappa p + s_i` on a periodic
/// grid, written out point by point.
fn stencil_accel(q: &[f64], p: &[f64], dx: f64, kappa: f64, s: &[f64]) -> Vec<f64> {
    let n = q.len();
    (0..n)
        .map(|i| {
            let (l, r) = (q[(i + n - 1) % n], q[(i + 1) % n]);
            (r - 2.0 * q[i] + l) / (dx * dx) - kappa * p[i] + s[i]
        })
        .collect()
}

fn wave_energy(q: &[f64], p: &[f64], dx: f64) -> f64 {
    let n = q.len();
    (0..n)
        .map(|i| {
            let g = (q[(i + 1) % n] - q[i]) / dx;
            0.5 * dx * (g * g + p[i] * p[i])
        })
        .sum()
}

fn criterion_1(o: &mut Outcome) {
    let kappa = 0.1;
    let m = damped_oscillator(kappa).unwrap();
    let x0 = StatePoint::from_slice(&[1.0, 0.0, 0.0]).unwrap();
    let start = Instant::now();
    let tr = rk4(&m, &x0, 1e-3, 10.0);
    let elapsed = start.elapsed().as_secs_f64();
    let w = (1.0 - kappa * kappa / 4.0).sqrt();
    let exact = |t: f64| (-kappa * t / 2.0).exp() * ((w * t).cos() + kappa / (2.0 * w) * (w * t).sin());
    let err = max_over(tr.times.iter().zip(&tr.states).map(|(t, s)| (s[0] - exact(*t)).abs()));
    o.below("max |q - q_exact|", err, 1e-6);
    o.check("runtime", elapsed < 1.0, format!("{elapsed:.3} s < 1 s"));
}

fn criterion_2(o: &mut Outcome) {
    let runs: Vec<(ModelBundle, f64, f64)> = vec![
        (damped_oscillator(0.1).unwrap(), 1e-3, 10.0),
        (oneform_field(0.2, 16).unwrap(), 1e-3, 10.0),
        (damped_wave(0.1, 64, TAU, PER).unwrap(), 1e-3, 5.0),
    ];
    for (m, dt, t) in runs {
        let kappa = m.params.kappa;
        let tr = rk4(&m, &m.initial, dt, t);
        let h0 = tr.h_trace[0];
        let law = max_over(tr.times.iter().zip(&tr.h_trace).map(|(t, h)| (h / h0 - (-kappa * t).exp()).abs()));
        o.below(&format!("{} |H/H0 - exp(-kt)|", m.name()), law, 1e-5);
        let fit = fit_decay_rate(&tr.times, &tr.h_trace).unwrap();
        o.below(&format!("{} rel. error of fitted kappa", m.name()), (fit.kappa - kappa).abs() / kappa, 1e-3);
        o.below(&format!("{} 1 - r2", m.name()), 1.0 - fit.r2, 1e-8);
    }
}

fn criterion_3(o: &mut Outcome) {
    let (kappa, n) = (0.2, 16);
    let m = oneform_field(kappa, n).unwrap();
    let x0 = m.initial.clone();
    let closed = |t: f64| {
        let mut x = DVector::zeros(1 + 2 * n);
        x[0] = x0[0] * (-kappa * t).exp();
        let d = (-kappa * t / 2.0).exp();
        let (s, c) = t.sin_cos();
        for i in 0..n {
            let (a1, a2) = (x0[1 + 2 * i], x0[2 + 2 * i]);
            x[1 + 2 * i] = d * (a1 * c + a2 * s);
            x[2 + 2 * i] = d * (-a1 * s + a2 * c);
        }
        x
    };
    let a = m.linear_generator.clone().unwrap();
    let exact_err = max_over((0..=20).map(|k| {
        let t = 0.5 * k as f64;
        (exact_linear_flow(&a, x0.coords(), t).unwrap() - closed(t)).amax()
    }));
    o.below("exact_linear_flow vs rotation-decay", exact_err, 1e-12);
    let tr = rk4(&m, &x0, 1e-3, 10.0);
    let rk_err = max_over(tr.times.iter().zip(&tr.states).map(|(t, s)| (s.coords() - closed(*t)).amax()));
    o.below("RK4 vs rotation-decay", rk_err, 1e-6);
}

fn criterion_4(o: &mut Outcome) {
    let (kappa, n) = (0.1, 64);
    let m = damped_wave(kappa, n, TAU, PER).unwrap();
    let dx = TAU / n as f64;
    let oracle = move |x: &DVector<f64>| {
        let q: Vec<f64> = x.rows(1, n).iter().copied().collect();
        let p: Vec<f64> = x.rows(1 + n, n).iter().copied().collect();
        let acc = stencil_accel(&q, &p, dx, kappa, &vec![0.0; n]);
        let h = kappa * x[0] + wave_energy(&q, &p, dx);
        let mut v = DVector::zeros(1 + 2 * n);
        v[0] = dx * p.iter().map(|p| p * p).sum::<f64>() - h;
        for i in 0..n {
            v[1 + i] = p[i];
            v[1 + n + i] = acc[i];
        }
        v
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rhs_err = max_over((0..100).map(|_| {
        let x = m.sample_state(&mut rng);
        (m.vector_field(&x, rank_tolerance(m.dim())).unwrap() - oracle(x.coords())).amax()
    }));
    o.below("flat-map RHS vs stencil RHS", rhs_err, 1e-10);

    let tr = rk4(&m, &m.initial, 1e-3, 5.0);
    let reference = rk4_integrate(|x| Ok(oracle(x.coords())), &m.initial, 1e-3, 5.0, &m.hamiltonian).unwrap();
    let traj_err = max_over(tr.states.iter().zip(&reference.states).map(|(a, b)| (a.coords() - b.coords()).amax()));
    o.below("trajectory difference over T = 5", traj_err, 1e-8);
    let r = pde_residual(&tr, &m).unwrap();
    o.below("pde residual", r.max_residual, 1e-4);
}

fn criterion_5(o: &mut Outcome) {
    let n = 64;
    let g = Grid::new(n, TAU, PER).unwrap();
    let m = wave_with_source(n, TAU, PER, Source::sine(&g), Potential::Simple).unwrap();
    let tr = rk4(&m, &m.initial, 1e-3, 5.0);
    // Independent check of q'' = Lap q + u with u = sin t sin x.
    let dt = 1e-3;
    let dx = g.dx();
    let mut worst: f64 = 0.0;
    for k in 1..tr.len() - 1 {
        let q = |j: usize| -> Vec<f64> { tr.states[j].rows(1, n).iter().copied().collect() };
        let (qm, q0, qp) = (q(k - 1), q(k), q(k + 1));
        let t = tr.states[k][0];
        // Grid points x_i = i dx on [0, 2 pi).
        let u: Vec<f64> = (0..n).map(|i| t.sin() * (i as f64 * dx).sin()).collect();
        let acc = stencil_accel(&q0, &vec![0.0; n], dx, 0.0, &u);
        for i in 0..n {
            worst = worst.max(((qp[i] - 2.0 * q0[i] + qm[i]) / (dt * dt) - acc[i]).abs());
        }
    }
    let lib = pde_residual(&tr, &m).unwrap().max_residual;
    o.below("residual of q'' - Lap q - u", worst, 1e-4);
    o.below("library pde residual", lib, 1e-4);

    let free = wave_with_source(n, TAU, PER, Source::none(&g), Potential::Simple).unwrap();
    let tr = rk4(&free, &free.initial, 1e-3, 5.0);
    let energy = |s: &StatePoint| {
        let q: Vec<f64> = s.rows(1, n).iter().copied().collect();
        let p: Vec<f64> = s.rows(1 + n, n).iter().copied().collect();
        wave_energy(&q, &p, dx)
    };
    let e0 = energy(&tr.states[0]);
    let drift = max_over(tr.states.iter().map(|s| (energy(s) - e0).abs()));
    o.below("energy drift with u = 0", drift, 1e-8);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let theta_err = max_over((0..100).map(|_| {
        let x = m.sample_state(&mut rng);
        let e = m.vector_field(&x, rank_tolerance(m.dim())).unwrap();
        let ModelStructure::Cosymplectic(s) = &m.structure else { unreachable!() };
        (s.theta_at(&x).unwrap().pair(&e) - 1.0).abs()
    }));
    o.below("|theta(E_H) - 1|", theta_err, 1e-12);
}

fn criterion_6(o: &mut Outcome) {
    let (kappa, n) = (0.1, 64);
    let g = Grid::new(n, TAU, PER).unwrap();
    let m = damped_wave_source(kappa, n, TAU, PER, Source::sine(&g)).unwrap();
    let tr = rk4(&m, &m.initial, 1e-3, 5.0);
    o.below("pde residual", pde_residual(&tr, &m).unwrap().max_residual, 1e-4);

    let ModelStructure::Cocontact(s) = &m.structure else { unreachable!() };
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut th, mut et) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let x = m.sample_state(&mut rng);
        let v = m.vector_field(&x, rank_tolerance(m.dim())).unwrap();
        th = th.max((s.theta_at(&x).unwrap().pair(&v) - 1.0).abs());
        et = et.max((s.eta_at(&x).unwrap().pair(&v) + m.hamiltonian.value(&x)).abs());
    }
    o.below("|theta(X_H) - 1|", th, 1e-12);
    o.below("|eta(X_H) + H|", et, 1e-12);

    let no_source = damped_wave_source(kappa, n, TAU, PER, Source::none(&g)).unwrap();
    let dw = damped_wave(kappa, n, TAU, PER).unwrap();
    let undamped = damped_wave_source(0.0, n, TAU, PER, Source::sine(&g)).unwrap();
    let ws = wave_with_source(n, TAU, PER, Source::sine(&g), Potential::Simple).unwrap();
    let (mut e1, mut e2) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let x = m.sample_state(&mut rng);
        let v = no_source.vector_field(&x, 1e-12).unwrap();
        let w = dw
            .vector_field(&StatePoint::new(x.rows(1, 2 * n + 1).into_owned()).unwrap(), 1e-12)
            .unwrap();
        e1 = e1.max((v.rows(1, 2 * n + 1) - w).amax());
        let v = undamped.vector_field(&x, 1e-12).unwrap();
        let mut tqp = DVector::zeros(2 * n + 1);
        tqp[0] = x[0];
        tqp.rows_mut(1, 2 * n).copy_from(&x.rows(2, 2 * n));
        let w = ws.vector_field(&StatePoint::new(tqp).unwrap(), 1e-12).unwrap();
        e2 = e2.max((v[0] - w[0]).abs()).max((v.rows(2, 2 * n) - w.rows(1, 2 * n)).amax());
    }
    o.below("u = 0 vs damped wave", e1, 1e-10);
    o.below("kappa = 0 vs wave with source", e2, 1e-10);
}

fn expected_shape(check: &StructureCheck, c: Corruption) -> bool {
    match (check, c) {
        (StructureCheck::Contact(r) | StructureCheck::AlmostContact(r), Corruption::EtaZero) => {
            r.dim_ker_eta == r.dim && r.flat_rank < r.dim
        }
        (StructureCheck::Contact(r) | StructureCheck::AlmostContact(r), Corruption::DEtaZero) => {
            r.dim_ker_deta == r.dim && r.flat_rank < r.dim
        }
        (StructureCheck::Cocontact(r), _) => !r.splits && r.flat_rank < r.dim,
        (StructureCheck::LevelSet(r), Corruption::DEtaZero) => {
            r.eta.amax() == 0.0 && r.report.dim_ker_deta == r.report.dim
        }
        _ => false,
    }
}

fn criterion_7(o: &mut Outcome) {
    let g = Grid::new(16, TAU, PER).unwrap();
    let models = vec![
        damped_oscillator(0.1).unwrap(),
        oneform_field(0.2, 8).unwrap(),
        damped_wave(0.1, 16, TAU, PER).unwrap(),
        wave_with_source(16, TAU, PER, Source::sine(&g), Potential::Simple).unwrap(),
        damped_wave_source(0.1, 16, TAU, PER, Source::sine(&g)).unwrap(),
        sphere_of_oneforms(8).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in &models {
        let tol = rank_tolerance(m.dim());
        let mut pass = 0;
        let mut agree = 0;
        let mut corrupt_ok = 0;
        let mut corrupt_total = 0;
        for _ in 0..100 {
            let x = m.sample_state(&mut rng);
            let r = m.verify_at(&x, tol).unwrap();
            pass += r.passes() as usize;
            agree += r.conditions_agree() as usize;
            let mut kinds = vec![Corruption::EtaZero, Corruption::DEtaZero];
            if matches!(m.structure, ModelStructure::Cocontact(_)) {
                kinds.push(Corruption::ThetaEqEta);
            }
            for c in kinds {
                corrupt_total += 1;
                let bad = m.corrupt(c).unwrap();
                let ok = match bad.verify_at(&x, tol) {
                    Ok(r) => !r.passes() && r.conditions_agree() && expected_shape(&r, c),
                    // A vanishing Liouville field is tangent to every level set.
                    Err(Error::TangentLiouville { .. }) => {
                        c == Corruption::EtaZero && matches!(m.structure, ModelStructure::LevelSet(_))
                    }
                    Err(_) => false,
                };
                corrupt_ok += ok as usize;
            }
        }
        o.check(&format!("{} passes", m.name()), pass == 100, format!("{pass}/100"));
        o.check(&format!("{} conditions agree", m.name()), agree == 100, format!("{agree}/100"));
        o.check(
            &format!("{} corruptions rejected", m.name()),
            corrupt_ok == corrupt_total,
            format!("{corrupt_ok}/{corrupt_total}"),
        );
    }
}

fn criterion_8(o: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut decomp, mut orth, mut idem) = (0.0f64, 0.0f64, 0.0f64);
    let mut built = 0;
    while built < 50 {
        let k = rng.random_range(1..=6usize);
        let n = 2 * k;
        let pairs = rng.random_range(1..=k);
        // A random symplectic form Omega = A^T J A and a random subspace.
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)) + DMatrix::identity(n, n) * 2.0;
        let omega = a.transpose() * darboux_matrix(k, 1.0) * &a;
        let omega = (&omega - omega.transpose()) * 0.5;
        let basis: Vec<DVector<f64>> =
            (0..2 * pairs).map(|_| DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))).collect();
        let Ok(split) = symplectic_complement(&omega, &basis, rank_tolerance(n)) else { continue };
        built += 1;
        let p = &split.projector;
        idem = idem.max((p * p - p).amax());
        let w = DMatrix::from_columns(&basis);
        let svd = w.clone().svd(true, true);
        for _ in 0..5 {
            let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let pv = p * &v;
            let rest = &v - &pv;
            let coeffs = svd.solve(&pv, 1e-12).unwrap();
            decomp = decomp.max((&w * coeffs - &pv).amax()).max((&pv + &rest - &v).amax());
            for b in &basis {
                orth = orth.max(b.dot(&(&omega * &rest)).abs());
            }
        }
    }
    o.below("decomposition residual", decomp, 1e-10);
    o.below("Omega-orthogonality residual", orth, 1e-10);
    o.below("projector idempotence", idem, 1e-12);

    let mut additive = 0;
    for _ in 0..50 {
        let build = |rng: &mut ChaCha8Rng| {
            let k = rng.random_range(1..=4usize);
            let drop = rng.random_range(0..=k);
            let n = 2 * k;
            let mut j = darboux_matrix(k, 1.0);
            for i in 0..drop {
                j[(2 * i, 2 * i + 1)] = 0.0;
                j[(2 * i + 1, 2 * i)] = 0.0;
            }
            let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)) + DMatrix::identity(n, n) * 2.0;
            let w = a.transpose() * j * &a;
            SymplecticStructure::new(n, TwoForm::Constant((&w - w.transpose()) * 0.5), None).unwrap()
        };
        let (s1, s2) = (build(&mut rng), build(&mut rng));
        let rank = |s: &SymplecticStructure| {
            numerical_rank(&s.omega_at(&StatePoint::zeros(s.dim())).unwrap(), rank_tolerance(s.dim()))
        };
        additive += (rank(&direct_sum(&s1, &s2)) == rank(&s1) + rank(&s2)) as usize;
    }
    o.check("direct-sum rank additivity", additive == 50, format!("{additive}/50"));
}

/// Alternating sum over all permutations (generated recursively, sign by inversion count), divided by 2^k.
fn brute_wedge(eta: &DVector<f64>, d: &DMatrix<f64>, vs: &[DVector<f64>]) -> f64 {
    fn perms(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            cur.push(v);
            perms(rest, cur, out);
            cur.pop();
            rest.insert(i, v);
        }
    }
    let m = vs.len();
    let mut all = Vec::new();
    perms(&mut (0..m).collect(), &mut Vec::new(), &mut all);
    let mut total = 0.0;
    for p in all {
        let inversions = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        let mut term = eta.dot(&vs[p[0]]);
        for pair in p[1..].chunks(2) {
            term *= vs[pair[0]].dot(&(d * &vs[pair[1]]));
        }
        total += sign * term;
    }
    total / 2f64.powi(((m - 1) / 2) as i32)
}

fn criterion_9(o: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (k, expected) in [(1usize, 1.0), (2, 2.0), (3, 6.0)] {
        let n = 2 * k + 1;
        let c = ContactStructure::canonical(k);
        let x = StatePoint::zeros(n);
        let e = |i: usize| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 });
        let mut tuple = vec![e(n - 1)];
        tuple.extend((0..2 * k).map(e));
        let value = eta_wedge_deta_power(&c, &x, &tuple).unwrap();
        let brute = brute_wedge(c.eta_at(&x).unwrap().comps(), &c.d_eta_at(&x).unwrap(), &tuple);
        // The plain product eta(R) d eta(e_1, f_1) ... is 1 on this tuple.
        let factorial: f64 = (1..=k).map(|i| i as f64).product();
        o.check(
            &format!("R^{n} canonical tuple"),
            value == expected && brute == expected && value == factorial,
            format!("{value} (brute force {brute}, k! = {factorial})"),
        );

        // Alternation and multilinearity on integer tuples, compared exactly.
        let y = StatePoint::new(DVector::from_fn(n, |_, _| rng.random_range(-3i32..=3) as f64)).unwrap();
        let ints = |rng: &mut ChaCha8Rng| DVector::from_fn(n, |_, _| rng.random_range(-3i32..=3) as f64);
        let base: Vec<DVector<f64>> = (0..n).map(|_| ints(&mut rng)).collect();
        let f = |t: &[DVector<f64>]| eta_wedge_deta_power(&c, &y, t).unwrap();
        let v0 = f(&base);
        let mut swapped = base.clone();
        swapped.swap(0, n - 1);
        let w = ints(&mut rng);
        let mut lin = base.clone();
        lin[1] = &base[1] * 2.0 - &w * 3.0;
        let mut with_w = base.clone();
        with_w[1] = w;
        let brute = brute_wedge(c.eta_at(&y).unwrap().comps(), &c.d_eta_at(&y).unwrap(), &base);
        let ok = f(&swapped) == -v0 && f(&lin) == 2.0 * v0 - 3.0 * f(&with_w) && brute == v0;
        o.check(&format!("R^{n} alternation and multilinearity"), ok, format!("value {v0}"));
    }
}

fn criterion_10(o: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut restriction = |label: &str, m: &ModelBundle, s: &SymplecticStructure, level: f64| {
        let (mut pass, mut worst) = (0, 0.0f64);
        for _ in 0..50 {
            let x = m.sample_state(&mut rng);
            let y = |p: &StatePoint| p.coords().clone();
            let r = contact_type_restriction(s, &m.hamiltonian, &y, &x, level, 1e-9).unwrap();
            pass += r.report.passes as usize;
            let v = r.vertical.column(0).into_owned();
            let star = hodge_star(x.coords()).normalize();
            worst = worst.max(1.0 - v.dot(&star).abs());
        }
        o.check(&format!("{label} restriction passes"), pass == 50, format!("{pass}/50"));
        o.below(&format!("{label} vertical vs star"), worst, 1e-8);
    };
    for n in [1usize, 4, 8] {
        let m = sphere_of_oneforms(n).unwrap();
        let ModelStructure::LevelSet(l) = &m.structure else { unreachable!() };
        restriction(&format!("sphere N = {n}"), &m, &l.symplectic, l.level);
    }
    // S^3 as the N = 2 sphere model: R^4 with the standard form and |x|^2 / 2 = 1.
    let m = sphere_of_oneforms(2).unwrap();
    restriction("S^3", &m, &SymplecticStructure::standard(2), 1.0);

    let s = SymplecticStructure::standard(4);
    let mut worst_f: f64 = 0.0;
    let mut fit_res: f64 = 0.0;
    let mut factors = Vec::new();
    for _ in 0..10 {
        let x = StatePoint::new(DVector::from_fn(8, |_, _| rng.random_range(-1.0..1.0))).unwrap();
        let fit = liouville_factor(&s, &|p: &StatePoint| p.coords().clone(), &x, 1e-4).unwrap();
        worst_f = worst_f.max((fit.factor - 1.0).abs());
        fit_res = fit_res.max(fit.residual);
        factors.push(fit.factor);
    }
    o.below("Liouville fit residual", fit_res, 1e-6);
    o.check(
        "Liouville factor f = 1 for Y = identity",
        worst_f < 1e-4,
        format!("f = {:.6} (|f - 1| = {worst_f:.3e}; d(iota_x omega) = 2 omega)", factors[0]),
    );
    // The failure above must be the factor-of-two identity, nothing else.
    let two = factors.iter().all(|f| (f - 2.0).abs() < 1e-8);
    o.check("f = 2 exactly (cross-check)", two, format!("{factors:.3?}"));
}

fn main() {
    let criteria: [(usize, &str, fn(&mut Outcome)); 10] = [
        (1, "damped oscillator vs closed form", criterion_1),
        (2, "dissipation law H(t) = H(0) exp(-kappa t)", criterion_2),
        (3, "one-form field rotation-decay solution", criterion_3),
        (4, "damped wave N = 64", criterion_4),
        (5, "wave with source", criterion_5),
        (6, "cocontact damped wave with source", criterion_6),
        (7, "structure verification and corruptions", criterion_7),
        (8, "symplectic complement and direct sums", criterion_8),
        (9, "wedge power values and convention", criterion_9),
        (10, "level sets of contact type", criterion_10),
    ];
    let mut unexpected = Vec::new();
    for (id, title, run) in criteria {
        let mut o = Outcome::default();
        run(&mut o);
        let ok = o.passed();
        println!("criterion {id:>2}: {} {title}", if ok { "PASS" } else { "FAIL" });
        for c in &o.checks {
            println!("    [{}] {}: {}", if c.ok { "ok" } else { "xx" }, c.label, c.detail);
        }
        if !ok {
            let known = KNOWN_DEVIATIONS.contains(&id);
            // A known deviation may only fail on its documented sub-check.
            let only_documented = id == 10 && o.checks.iter().filter(|c| !c.ok).all(|c| c.label.starts_with("Liouville factor f = 1"));
            if !(known && only_documented) {
                unexpected.push(id);
            }
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria PASS except documented deviations {KNOWN_DEVIATIONS:?}");
    } else {
        println!("acceptance: unexpected failures in criteria {unexpected:?}");
        std::process::exit(1);
    }
}
