//! Random stable trusses and the exact structural identities every analysis
//! must satisfy, plus an independent floating-point solve to compare against.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symtruss::engine::{analyze, assemble, audit, AnalysisResult};
use symtruss::kernel::{Expr, Symbol};
use symtruss::model::{load_model_str, Stiffness, TrussModel};

/// Squarefree part of a positive integer.
fn squarefree_part(mut n: u64) -> u64 {
    let mut out = 1;
    let mut p = 2;
    while p * p <= n {
        let mut k = 0;
        while n.is_multiple_of(p) {
            n /= p;
            k += 1;
        }
        if k % 2 == 1 {
            out *= p;
        }
        p += 1;
    }
    out * n
}

fn half(k: i64) -> String {
    match k {
        0 => "0".into(),
        k if k % 2 == 0 => format!("{}*L", k / 2),
        k => format!("{k}*L/2"),
    }
}

/// Henneberg type-I truss with `n` nodes on a half-unit grid (scaled by `L`),
/// possibly with redundant members, on a pin and a roller.
///
/// Members are limited to three distinct irrational length ratios so that the
/// exact solve stays in a small number field.
pub fn random_truss(rng: &mut ChaCha8Rng, n: usize) -> String {
    'retry: loop {
        let mut pts: Vec<(i64, i64)> = Vec::new();
        let mut bars: Vec<(usize, usize)> = Vec::new();
        let mut surds = std::collections::BTreeSet::new();
        let grid = |rng: &mut ChaCha8Rng| (rng.gen_range(0..=8i64), rng.gen_range(0..=6i64));
        let admit = |a: (i64, i64), b: (i64, i64), surds: &mut std::collections::BTreeSet<u64>| {
            let q = ((a.0 - b.0).pow(2) + (a.1 - b.1).pow(2)) as u64;
            let s = squarefree_part(q);
            if s > 1 {
                surds.insert(s);
            }
            surds.len() <= 3
        };
        pts.push(grid(rng));
        loop {
            let p = grid(rng);
            if p != pts[0] {
                pts.push(p);
                break;
            }
        }
        if !admit(pts[0], pts[1], &mut surds) {
            continue 'retry;
        }
        bars.push((0, 1));
        for k in 2..n {
            let mut attempts = 0;
            loop {
                attempts += 1;
                if attempts > 200 {
                    continue 'retry;
                }
                let ids: Vec<usize> = (0..k).collect();
                let pick: Vec<usize> = ids.choose_multiple(rng, 2).copied().collect();
                let (a, b) = (pts[pick[0]], pts[pick[1]]);
                let p = grid(rng);
                let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                if cross == 0 || pts.contains(&p) {
                    continue;
                }
                let mut trial = surds.clone();
                if admit(a, p, &mut trial) && admit(b, p, &mut trial) {
                    surds = trial;
                    pts.push(p);
                    bars.push((pick[0], k));
                    bars.push((pick[1], k));
                    break;
                }
            }
        }
        // Up to two redundant members.
        for _ in 0..rng.gen_range(0..=2) {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let (i, j) = (i.min(j), i.max(j));
            if i != j && !bars.contains(&(i, j)) && !bars.contains(&(j, i)) {
                let mut trial = surds.clone();
                if admit(pts[i], pts[j], &mut trial) {
                    surds = trial;
                    bars.push((i, j));
                }
            }
        }
        let mut text = String::from("[parameters]\nEA L P\n[nodes]\n");
        for (k, (x, y)) in pts.iter().enumerate() {
            text.push_str(&format!("{} {} {}\n", k + 1, half(*x), half(*y)));
        }
        text.push_str("[elements]\n");
        for (k, (i, j)) in bars.iter().enumerate() {
            let ea = ["EA", "2*EA", "EA/2", "3*EA/2"][rng.gen_range(0..4)];
            text.push_str(&format!("{} {} {} {ea}\n", k + 1, i + 1, j + 1));
        }
        // A roller perpendicular to node 1 -> 2 would leave a rotation free.
        let roller = if pts[1].0 != pts[0].0 { "free fixed" } else { "fixed free" };
        text.push_str(&format!("[supports]\n1 fixed fixed\n2 {roller}\n[loads]\n"));
        let mut loaded: Vec<usize> = (0..n).collect();
        loaded.shuffle(rng);
        for &k in loaded.iter().take(rng.gen_range(1..=3.min(n))) {
            let (fx, fy) = loop {
                let (a, b) = (rng.gen_range(-2..=2i64), rng.gen_range(-2..=2i64));
                if a != 0 || b != 0 {
                    break (a, b);
                }
            };
            let f = |c: i64| if c == 0 { "0".to_string() } else { format!("{c}*P") };
            text.push_str(&format!("{} {} {}\n", k + 1, f(fx), f(fy)));
        }
        return text;
    }
}

pub fn random_trusses(seed: u64, count: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(3..=8);
            random_truss(&mut rng, n)
        })
        .collect()
}

fn scaled_loads(m: &TrussModel, k: &Expr) -> TrussModel {
    let mut out = m.clone();
    for l in &mut out.loads {
        l.fx = &l.fx * k;
        l.fy = &l.fy * k;
    }
    out
}

fn scaled_stiffness(m: &TrussModel, k: &Expr) -> TrussModel {
    let mut out = m.clone();
    for el in &mut out.elements {
        el.stiffness = match &el.stiffness {
            Stiffness::Combined(ea) => Stiffness::Combined(ea * k),
            Stiffness::Separate { e, a } => Stiffness::Separate { e: e * k, a: a.clone() },
        };
    }
    out
}

fn scaled_geometry(m: &TrussModel, k: &Expr) -> TrussModel {
    let mut out = m.clone();
    for n in &mut out.nodes {
        n.x = &n.x * k;
        n.y = &n.y * k;
    }
    out
}

fn scaled(v: &[Expr], k: &Expr) -> Vec<Expr> {
    v.iter().map(|x| x * k).collect()
}

fn reactions(r: &AnalysisResult) -> Vec<Expr> {
    r.reactions.iter().map(|x| x.value.clone()).collect()
}

/// Float reference: independent assembly in f64 and an LU solve.
/// Returns `(displacements, axial forces)`.
pub fn float_solve(m: &TrussModel, at: &BTreeMap<Symbol, f64>) -> (Vec<f64>, Vec<f64>) {
    let ev = |e: &Expr| e.eval_f64(at).expect("bound point");
    let n = 2 * m.node_count();
    let xy: Vec<(f64, f64)> = m.nodes.iter().map(|p| (ev(&p.x), ev(&p.y))).collect();
    let mut k = DMatrix::<f64>::zeros(n, n);
    let mut geo = Vec::new();
    for el in &m.elements {
        let (a, b) = (xy[el.i - 1], xy[el.j - 1]);
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len = dx.hypot(dy);
        let (c, s) = (dx / len, dy / len);
        let ea = ev(&el.stiffness.ea());
        let dofs = [2 * (el.i - 1), 2 * (el.i - 1) + 1, 2 * (el.j - 1), 2 * (el.j - 1) + 1];
        let v = [-c, -s, c, s];
        for p in 0..4 {
            for q in 0..4 {
                k[(dofs[p], dofs[q])] += ea / len * v[p] * v[q];
            }
        }
        geo.push((dofs, v, ea / len));
    }
    let mut f = DVector::<f64>::zeros(n);
    for l in &m.loads {
        f[2 * (l.node - 1)] += ev(&l.fx);
        f[2 * (l.node - 1) + 1] += ev(&l.fy);
    }
    let free: Vec<usize> =
        m.fixity().iter().flatten().enumerate().filter(|(_, fixed)| !**fixed).map(|(g, _)| g).collect();
    let kff = DMatrix::from_fn(free.len(), free.len(), |i, j| k[(free[i], free[j])]);
    let ff = DVector::from_fn(free.len(), |i, _| f[free[i]]);
    let df = kff.lu().solve(&ff).expect("nonsingular float system");
    let mut d = vec![0.0; n];
    for (i, &g) in free.iter().enumerate() {
        d[g] = df[i];
    }
    let forces = geo.iter().map(|(dofs, v, k)| k * (0..4).map(|p| v[p] * d[dofs[p]]).sum::<f64>()).collect();
    (d, forces)
}

fn close(exact: &[f64], float: &[f64], tol: f64) -> bool {
    let scale = float.iter().fold(0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    exact.iter().zip(float).all(|(a, b)| (a - b).abs() <= tol * scale)
}

/// Every exact identity plus the float comparison; `Err` says which failed.
pub fn check_truss(m: &TrussModel, seed: u64) -> Result<(), String> {
    let r = analyze(m).map_err(|e| format!("analysis: {e}"))?;
    let asm = assemble(m).map_err(|e| format!("assembly: {e}"))?;
    for c in audit(m, &asm, &r) {
        if !c.passed {
            return Err(format!("{}: {:?}", c.name, c.detail));
        }
    }
    let d = r.dof_vector();

    // Fresh symbols for the scale factors keep the identities fully general.
    let env = &m.env;
    let alpha = Expr::symbol(env, env.declare("alpha_").unwrap());
    let kappa = Expr::symbol(env, env.declare("kappa_").unwrap());
    let lambda = Expr::symbol(env, env.declare("lambda_").unwrap());

    let ra = analyze(&scaled_loads(m, &alpha)).map_err(|e| e.to_string())?;
    if ra.dof_vector() != scaled(&d, &alpha)
        || ra.axial_forces != scaled(&r.axial_forces, &alpha)
        || reactions(&ra) != scaled(&reactions(&r), &alpha)
    {
        return Err("load linearity".into());
    }
    let rk = analyze(&scaled_stiffness(m, &kappa)).map_err(|e| e.to_string())?;
    let inv_k = kappa.inv().unwrap();
    if rk.dof_vector() != scaled(&d, &inv_k) || rk.axial_forces != r.axial_forces {
        return Err("stiffness scaling".into());
    }
    let rl = analyze(&scaled_geometry(m, &lambda)).map_err(|e| e.to_string())?;
    if rl.dof_vector() != scaled(&d, &lambda)
        || rl.axial_forces != r.axial_forces
        || reactions(&rl) != reactions(&r)
    {
        return Err("geometric similarity".into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let syms: Vec<Symbol> = m.env.symbols();
    for _ in 0..5 {
        let at: BTreeMap<Symbol, f64> = syms.iter().map(|&s| (s, rng.gen_range(0.5..4.0))).collect();
        let (fd, ff) = float_solve(m, &at);
        let ev = |v: &[Expr]| -> Vec<f64> { v.iter().map(|e| e.eval_f64(&at).unwrap()).collect() };
        if !close(&ev(&d), &fd, 1e-9) || !close(&ev(&r.axial_forces), &ff, 1e-9) {
            return Err(format!("float LU disagreement at {at:?}"));
        }
    }
    Ok(())
}

pub fn load(text: &str) -> TrussModel {
    load_model_str(text).unwrap_or_else(|e| panic!("{e}\n{text}"))
}
