//! Uniformly sampled 2-D fields with physical spacing metadata, the binary
//! grid-file format, discrete Fourier helpers, and bicubic interpolation.
//!
//! File format ("AGRD", version 1, little-endian):
//!   magic:   4 bytes "AGRD"
//!   version: u32 = 1
//!   flags:   u32, bit 0 set for complex payload
//!   nx, ny:  u32 each
//!   dx, dy, ox, oy: f64 each
//!   payload: nx*ny f64 (real) or 2*nx*ny f64 (complex, interleaved re/im),
//!            row-major with y as the outer index.
//! Readers reject trailing bytes; a write/read round trip is bit-identical.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

use crate::anisotropy::Vec2;

pub const GRID_MAGIC: &[u8; 4] = b"AGRD";
pub const GRID_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 4 + 4 * 8;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("bad magic at byte 0: expected 41475244 (\"AGRD\")")]
    BadMagic,
    #[error("unsupported version {0} at byte 4")]
    BadVersion(u32),
    #[error("payload size mismatch at byte {offset}: expected {expected} bytes, found {found}")]
    SizeMismatch {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid grid: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Sample storage: real or complex, row-major, y-outer.
#[derive(Debug, Clone, PartialEq)]
pub enum GridData {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// A uniformly sampled field with spacing and origin metadata. The sample
/// at (i, j) sits at (ox + i*dx, oy + j*dy) and is stored at index j*nx + i.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub ox: f64,
    pub oy: f64,
    pub data: GridData,
}

impl FieldGrid {
    pub fn zeros_real(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self, GridError> {
        Self::validate_shape(nx, ny, dx, dy)?;
        Ok(FieldGrid {
            nx,
            ny,
            dx,
            dy,
            ox: 0.0,
            oy: 0.0,
            data: GridData::Real(vec![0.0; nx * ny]),
        })
    }

    pub fn zeros_complex(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self, GridError> {
        Self::validate_shape(nx, ny, dx, dy)?;
        Ok(FieldGrid {
            nx,
            ny,
            dx,
            dy,
            ox: 0.0,
            oy: 0.0,
            data: GridData::Complex(vec![Complex64::new(0.0, 0.0); nx * ny]),
        })
    }

    fn validate_shape(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<(), GridError> {
        if nx < 8 || ny < 8 {
            return Err(GridError::Invalid(format!(
                "grid must be at least 8 x 8, got {nx} x {ny}"
            )));
        }
        if !(dx > 0.0) || !(dy > 0.0) {
            return Err(GridError::Invalid(format!(
                "spacings must be positive, got dx = {dx}, dy = {dy}"
            )));
        }
        Ok(())
    }

    pub fn with_origin(mut self, ox: f64, oy: f64) -> Self {
        self.ox = ox;
        self.oy = oy;
        self
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.data, GridData::Complex(_))
    }

    /// Physical position of sample (i, j).
    pub fn position(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(self.ox + i as f64 * self.dx, self.oy + j as f64 * self.dy)
    }

    /// Samples as complex regardless of storage.
    pub fn to_complex_vec(&self) -> Vec<Complex64> {
        match &self.data {
            GridData::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            GridData::Complex(v) => v.clone(),
        }
    }

    pub fn real_samples(&self) -> Option<&[f64]> {
        match &self.data {
            GridData::Real(v) => Some(v),
            GridData::Complex(_) => None,
        }
    }

    pub fn complex_samples(&self) -> Option<&[Complex64]> {
        match &self.data {
            GridData::Complex(v) => Some(v),
            GridData::Real(_) => None,
        }
    }

    /// Sum of squared moduli times the cell area (discrete L² norm squared).
    pub fn energy(&self) -> f64 {
        let cell = self.dx * self.dy;
        match &self.data {
            GridData::Real(v) => v.iter().map(|x| x * x).sum::<f64>() * cell,
            GridData::Complex(v) => v.iter().map(|z| z.norm_sqr()).sum::<f64>() * cell,
        }
    }
}

/// Signed DFT frequency for index k of n samples with spacing d:
/// 2π k̃ /(n d) with k̃ the usual wrap to (-n/2, n/2].
pub fn fft_freq(k: usize, n: usize, d: f64) -> f64 {
    let k = k as isize;
    let n_i = n as isize;
    let signed = if k <= (n_i - 1) / 2 { k } else { k - n_i };
    std::f64::consts::TAU * signed as f64 / (n as f64 * d)
}

/// In-place 2-D FFT over a row-major buffer; `inverse` applies the
/// unnormalized backward transform.
pub fn fft2_inplace(buf: &mut [Complex64], nx: usize, ny: usize, inverse: bool) {
    assert_eq!(buf.len(), nx * ny);
    let mut planner = FftPlanner::new();
    let fx = if inverse {
        planner.plan_fft_inverse(nx)
    } else {
        planner.plan_fft_forward(nx)
    };
    let fy = if inverse {
        planner.plan_fft_inverse(ny)
    } else {
        planner.plan_fft_forward(ny)
    };
    for row in buf.chunks_exact_mut(nx) {
        fx.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); ny];
    for i in 0..nx {
        for (j, c) in col.iter_mut().enumerate() {
            *c = buf[j * nx + i];
        }
        fy.process(&mut col);
        for (j, c) in col.iter().enumerate() {
            buf[j * nx + i] = *c;
        }
    }
}

/// Continuous-convention forward transform of a spatial grid:
/// G(ω_k) = Σ g(x_m) e^{-i ω_k · x_m} dx dy, on the signed frequency lattice.
pub fn dft_forward(grid: &FieldGrid) -> Vec<Complex64> {
    let mut buf = grid.to_complex_vec();
    fft2_inplace(&mut buf, grid.nx, grid.ny, false);
    let cell = grid.dx * grid.dy;
    // Origin phase ramp: e^{-i ω · origin}.
    for j in 0..grid.ny {
        let wy = fft_freq(j, grid.ny, grid.dy);
        for i in 0..grid.nx {
            let wx = fft_freq(i, grid.nx, grid.dx);
            let phase = Complex64::cis(-(wx * grid.ox + wy * grid.oy));
            buf[j * grid.nx + i] *= phase * cell;
        }
    }
    buf
}

/// Inverse of [`dft_forward`]: g(x_m) = (2π)^{-2} Σ G(ω_k) e^{i ω_k x_m} dω₁dω₂.
pub fn dft_inverse(spectrum: &[Complex64], grid_like: &FieldGrid) -> Vec<Complex64> {
    let (nx, ny) = (grid_like.nx, grid_like.ny);
    assert_eq!(spectrum.len(), nx * ny);
    let mut buf = spectrum.to_vec();
    for j in 0..ny {
        let wy = fft_freq(j, ny, grid_like.dy);
        for i in 0..nx {
            let wx = fft_freq(i, nx, grid_like.dx);
            let phase = Complex64::cis(wx * grid_like.ox + wy * grid_like.oy);
            buf[j * nx + i] *= phase;
        }
    }
    fft2_inplace(&mut buf, nx, ny, true);
    let scale = 1.0 / (nx as f64 * grid_like.dx * ny as f64 * grid_like.dy);
    for z in buf.iter_mut() {
        *z *= scale;
    }
    buf
}

/// Catmull-Rom kernel weights for fractional offset t in [0, 1).
fn catmull_rom(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// Separable bicubic (Catmull-Rom) interpolation of a row-major complex
/// lattice at fractional index (fi, fj); out-of-range taps read as zero.
/// Exact at lattice points.
pub fn bicubic_complex(data: &[Complex64], nx: usize, ny: usize, fi: f64, fj: f64) -> Complex64 {
    let i0 = fi.floor();
    let j0 = fj.floor();
    let wx = catmull_rom(fi - i0);
    let wy = catmull_rom(fj - j0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (dj, &wyj) in wy.iter().enumerate() {
        let j = j0 as isize + dj as isize - 1;
        if j < 0 || j >= ny as isize {
            continue;
        }
        let mut row = Complex64::new(0.0, 0.0);
        for (di, &wxi) in wx.iter().enumerate() {
            let i = i0 as isize + di as isize - 1;
            if i < 0 || i >= nx as isize {
                continue;
            }
            row += data[j as usize * nx + i as usize] * wxi;
        }
        acc += row * wyj;
    }
    acc
}

/// Real-lattice variant of [`bicubic_complex`].
pub fn bicubic_real(data: &[f64], nx: usize, ny: usize, fi: f64, fj: f64) -> f64 {
    let i0 = fi.floor();
    let j0 = fj.floor();
    let wx = catmull_rom(fi - i0);
    let wy = catmull_rom(fj - j0);
    let mut acc = 0.0;
    for (dj, &wyj) in wy.iter().enumerate() {
        let j = j0 as isize + dj as isize - 1;
        if j < 0 || j >= ny as isize {
            continue;
        }
        let mut row = 0.0;
        for (di, &wxi) in wx.iter().enumerate() {
            let i = i0 as isize + di as isize - 1;
            if i < 0 || i >= nx as isize {
                continue;
            }
            row += data[j as usize * nx + i as usize] * wxi;
        }
        acc += row * wyj;
    }
    acc
}

pub fn write_grid(path: &Path, grid: &FieldGrid) -> Result<(), GridError> {
    let bytes = encode_grid(grid);
    // Write-to-temp then rename: a failed run never leaves partial output.
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(&bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| GridError::Io(e.error))?;
    Ok(())
}

pub fn encode_grid(grid: &FieldGrid) -> Vec<u8> {
    let complex = grid.is_complex();
    let n = grid.nx * grid.ny;
    let payload_len = if complex { 2 * n } else { n } * 8;
    let mut out = Vec::with_capacity(HEADER_LEN + payload_len);
    out.extend_from_slice(GRID_MAGIC);
    out.extend_from_slice(&GRID_VERSION.to_le_bytes());
    out.extend_from_slice(&(complex as u32).to_le_bytes());
    out.extend_from_slice(&(grid.nx as u32).to_le_bytes());
    out.extend_from_slice(&(grid.ny as u32).to_le_bytes());
    for v in [grid.dx, grid.dy, grid.ox, grid.oy] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    match &grid.data {
        GridData::Real(v) => {
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        GridData::Complex(v) => {
            for z in v {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
    }
    out
}

pub fn read_grid(path: &Path) -> Result<FieldGrid, GridError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_grid(&bytes)
}

pub fn decode_grid(bytes: &[u8]) -> Result<FieldGrid, GridError> {
    if bytes.len() < HEADER_LEN {
        return Err(GridError::SizeMismatch {
            offset: 0,
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    if &bytes[0..4] != GRID_MAGIC {
        return Err(GridError::BadMagic);
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != GRID_VERSION {
        return Err(GridError::BadVersion(version));
    }
    let flags = u32_at(8);
    let complex = flags & 1 == 1;
    let nx = u32_at(12) as usize;
    let ny = u32_at(16) as usize;
    let dx = f64_at(20);
    let dy = f64_at(28);
    let ox = f64_at(36);
    let oy = f64_at(44);
    FieldGrid::validate_shape(nx, ny, dx, dy)?;
    let n = nx * ny;
    let expected = HEADER_LEN + if complex { 2 * n } else { n } * 8;
    if bytes.len() != expected {
        return Err(GridError::SizeMismatch {
            offset: HEADER_LEN,
            expected,
            found: bytes.len(),
        });
    }
    let data = if complex {
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            let re = f64_at(HEADER_LEN + 16 * k);
            let im = f64_at(HEADER_LEN + 16 * k + 8);
            v.push(Complex64::new(re, im));
        }
        GridData::Complex(v)
    } else {
        GridData::Real((0..n).map(|k| f64_at(HEADER_LEN + 8 * k)).collect())
    };
    Ok(FieldGrid {
        nx,
        ny,
        dx,
        dy,
        ox,
        oy,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn sample_grid(complex: bool) -> FieldGrid {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let (nx, ny) = (12, 9);
        let mut g = if complex {
            FieldGrid::zeros_complex(nx, ny, 0.25, 0.5).unwrap()
        } else {
            FieldGrid::zeros_real(nx, ny, 0.25, 0.5).unwrap()
        }
        .with_origin(-1.0, 2.0);
        match &mut g.data {
            GridData::Real(v) => v.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0)),
            GridData::Complex(v) => v
                .iter_mut()
                .for_each(|z| *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen())),
        }
        g
    }

    #[test]
    fn roundtrip_real_and_complex() {
        for complex in [false, true] {
            let g = sample_grid(complex);
            let bytes = encode_grid(&g);
            let back = decode_grid(&bytes).unwrap();
            assert_eq!(g, back);
            // Bit-identical re-encode.
            assert_eq!(bytes, encode_grid(&back));
        }
    }

    #[test]
    fn decode_rejects_corruption() {
        let g = sample_grid(false);
        let bytes = encode_grid(&g);

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_grid(&bad), Err(GridError::BadMagic)));

        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(decode_grid(&bad), Err(GridError::BadVersion(9))));

        let truncated = &bytes[..bytes.len() - 8];
        match decode_grid(truncated) {
            Err(GridError::SizeMismatch {
                expected, found, ..
            }) => {
                assert_eq!(expected, bytes.len());
                assert_eq!(found, bytes.len() - 8);
            }
            other => panic!("expected size mismatch, got {other:?}"),
        }

        let mut padded = bytes.clone();
        padded.extend_from_slice(&[0u8; 4]);
        assert!(matches!(
            decode_grid(&padded),
            Err(GridError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.agrd");
        let g = sample_grid(true);
        write_grid(&path, &g).unwrap();
        let back = read_grid(&path).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn dft_roundtrip_and_parseval() {
        let g = sample_grid(false);
        let spec = dft_forward(&g);
        let back = dft_inverse(&spec, &g);
        let orig = g.to_complex_vec();
        for (a, b) in orig.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
        // Discrete Parseval: Σ|g|² dx dy = (2π)^{-2} Σ|G|² dω₁ dω₂.
        let dw1 = std::f64::consts::TAU / (g.nx as f64 * g.dx);
        let dw2 = std::f64::consts::TAU / (g.ny as f64 * g.dy);
        let freq_energy = spec.iter().map(|z| z.norm_sqr()).sum::<f64>() * dw1 * dw2
            / (2.0 * std::f64::consts::PI).powi(2);
        assert_relative_eq!(g.energy(), freq_energy, max_relative = 1e-12);
    }

    #[test]
    fn dft_matches_direct_sum() {
        // Spot-check the continuous-convention forward transform against a
        // brute-force double sum, origin included.
        let g = sample_grid(false);
        let spec = dft_forward(&g);
        let v = g.real_samples().unwrap();
        for &(ki, kj) in &[(0usize, 0usize), (3, 2), (11, 8)] {
            let wx = fft_freq(ki, g.nx, g.dx);
            let wy = fft_freq(kj, g.ny, g.dy);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..g.ny {
                for i in 0..g.nx {
                    let x = g.position(i, j);
                    acc += v[j * g.nx + i] * Complex64::cis(-(wx * x.x + wy * x.y));
                }
            }
            acc *= g.dx * g.dy;
            assert!((acc - spec[kj * g.nx + ki]).norm() <= 1e-10 * acc.norm().max(1.0));
        }
    }

    #[test]
    fn fft_freq_layout() {
        assert_eq!(fft_freq(0, 8, 1.0), 0.0);
        assert_relative_eq!(
            fft_freq(4, 8, 1.0),
            -std::f64::consts::PI,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            fft_freq(7, 8, 1.0),
            -std::f64::consts::TAU / 8.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            fft_freq(3, 8, 0.5),
            3.0 * std::f64::consts::TAU / 4.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn bicubic_exact_at_nodes_and_smooth() {
        let (nx, ny) = (16, 12);
        let f = |x: f64, y: f64| (0.3 * x).sin() * (0.2 * y).cos() + 0.1 * x * y;
        let data: Vec<f64> = (0..nx * ny)
            .map(|k| f((k % nx) as f64, (k / nx) as f64))
            .collect();
        for &(i, j) in &[(2usize, 3usize), (7, 5), (14, 10)] {
            let got = bicubic_real(&data, nx, ny, i as f64, j as f64);
            assert_relative_eq!(got, data[j * nx + i], max_relative = 1e-14);
        }
        // Interior off-node accuracy for a smooth function.
        let got = bicubic_real(&data, nx, ny, 6.4, 5.7);
        assert!((got - f(6.4, 5.7)).abs() < 2e-3);
        // Complex variant consistency.
        let cdata: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, -0.5 * x)).collect();
        let gc = bicubic_complex(&cdata, nx, ny, 6.4, 5.7);
        assert_relative_eq!(gc.re, got, max_relative = 1e-13);
        assert_relative_eq!(gc.im, -0.5 * got, max_relative = 1e-13);
    }

    proptest::proptest! {
        #[test]
        fn encode_decode_roundtrip_random(
            nx in 8usize..20,
            ny in 8usize..20,
            complex in proptest::bool::ANY,
            seed in 0u64..1000,
        ) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut g = if complex {
                FieldGrid::zeros_complex(nx, ny, 0.1 + rng.gen::<f64>(), 0.1 + rng.gen::<f64>()).unwrap()
            } else {
                FieldGrid::zeros_real(nx, ny, 0.1 + rng.gen::<f64>(), 0.1 + rng.gen::<f64>()).unwrap()
            };
            match &mut g.data {
                GridData::Real(v) => v.iter_mut().for_each(|x| *x = rng.gen_range(-1e6..1e6)),
                GridData::Complex(v) => v.iter_mut().for_each(|z| *z = Complex64::new(rng.gen_range(-1e6..1e6), rng.gen_range(-1e6..1e6))),
            }
            let bytes = encode_grid(&g);
            let back = decode_grid(&bytes).unwrap();
            proptest::prop_assert_eq!(g, back);
        }
    }
}
