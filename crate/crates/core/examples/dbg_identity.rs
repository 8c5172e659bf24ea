// debug scratch: ring-resolved residual of the truncated identity
use anisoloc::anisotropy::{AnisotropySpec, Vec2};
use anisoloc::coherent::{coherent_state_freq, LocalIndex};
use anisoloc::grid::{FieldGrid, GridData};
use anisoloc::morse::MorseParams;
use anisoloc::operator::*;
use num_complex::Complex64;

fn main() {
    let p = MorseParams::new(2.0, 1.0).unwrap();
    let spec = AnisotropySpec::identity();
    let n = 84usize;
    let extent = 14.0;
    let d = 2.0 * extent / n as f64;
    let mut g = FieldGrid::zeros_complex(n, n, d, d).unwrap().with_origin(-extent, -extent);
    let mut vals = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for i in 0..n {
            let w = g.position(i, j);
            for &(a, b, amp) in &[
                (1.0, Vec2::new(0.6, -0.2), Complex64::new(1.0, 0.0)),
                (1.4, Vec2::new(-0.5, 0.4), Complex64::new(0.6, 0.3)),
            ] {
                let xi = LocalIndex::new(a, 0.0, b).unwrap();
                vals[j * n + i] += amp * coherent_state_freq(&p, &spec, &xi, w);
            }
        }
    }
    g.data = GridData::Complex(vals);
    let q = QuadratureSpec { n_a: 32, n_b: 32, n_nu: 64, nu_lo: 0.2, nu_hi: 12.0 };
    let region = OperatorRegion::Full { a_lo: 0.04, a_hi: 20.0, b_max: 10.0 };
    let out = apply_full_operator(&g, &p, &spec, region, &q).unwrap();
    let gi = g.complex_samples().unwrap();
    let go = out.complex_samples().unwrap();
    // ring-resolved residual
    let mut ring_num = vec![0.0; 16];
    let mut ring_den = vec![0.0; 16];
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..n {
        for i in 0..n {
            let w = g.position(i, j);
            let k = ((w.norm() / 12.0 * 16.0) as usize).min(15);
            let e = (gi[j * n + i] - go[j * n + i]).norm_sqr();
            ring_num[k] += e;
            ring_den[k] += gi[j * n + i].norm_sqr();
            num += e;
            den += gi[j * n + i].norm_sqr();
        }
    }
    println!("total rel = {:.4}", (num / den).sqrt());
    for k in 0..16 {
        println!(
            "ring nu in [{:.2},{:.2}): den_frac={:.3e} err_frac={:.3e}",
            k as f64 * 0.75,
            (k + 1) as f64 * 0.75,
            ring_den[k] / den,
            ring_num[k] / den
        );
    }
}
