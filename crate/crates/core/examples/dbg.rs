use hagedorn::overlap::overlap_matrix_simplex;
use hagedorn::wavepacket::eval_basis_on_grid;
use hagedorn::*;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let bra = GaussianParams::random(2, &mut rng);
    let ket = GaussianParams::random(2, &mut rng);
    let m = overlap_matrix_simplex(&bra, &ket, 3, 3).unwrap();
    let n = 260;
    let (a, b) = (-12.0, 12.0);
    let dx = (b - a) / n as f64;
    let mut pts = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            pts.push(RVector::from_vec(vec![a + (i as f64 + 0.5) * dx, a + (j as f64 + 0.5) * dx]));
        }
    }
    let bg = eval_basis_on_grid(&bra, 3, &pts).unwrap();
    let kg = eval_basis_on_grid(&ket, 3, &pts).unwrap();
    let mut per_shell = [[0.0f64; 4]; 4];
    for bi in 0..m.bra_set().len() {
        for ki in 0..m.ket_set().len() {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..pts.len() {
                acc += bg.values()[(bi, c)].conj() * kg.values()[(ki, c)] * dx * dx;
            }
            let d = (acc - m.values()[(bi, ki)]).norm();
            let (sa, sb) = (m.bra_set().get(bi).shell() as usize, m.ket_set().get(ki).shell() as usize);
            per_shell[sa][sb] = per_shell[sa][sb].max(d);
        }
    }
    println!("max |alg - int| by (bra shell, ket shell):");
    for sa in 0..4 {
        let row: Vec<String> = (0..4).map(|sb| format!("{:.2e}", per_shell[sa][sb])).collect();
        println!("  bra {sa}: {}", row.join("  "));
    }
}
