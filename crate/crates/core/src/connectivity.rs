//! Hilbert analytic phase and phase-lag-index connectivity.

use std::f64::consts::PI;
use std::io::Write;

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::{fft_in_place, fft_real};
use crate::error::{Error, Result, ResultExt};
use crate::layout::{CHANNELS, N_CHANNELS};
use crate::signal::Epoch;

pub const MIN_PHASE_LEN: usize = 16;
/// Fraction of samples dropped at each end before averaging phase-difference signs.
pub const EDGE_TRIM: f64 = 0.05;
pub const N_EDGES: usize = N_CHANNELS * (N_CHANNELS - 1) / 2;

/// Wraps an angle into (−π, π].
pub fn wrap_phase(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Instantaneous phase of the analytic signal, computed in the frequency domain.
pub fn analytic_phase(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n < MIN_PHASE_LEN {
        return Err(Error::SignalTooShort {
            len: n,
            needed: MIN_PHASE_LEN,
        });
    }
    if x.iter().all(|&v| v == x[0]) {
        return Err(Error::DegenerateSignal("analytic phase of a constant series".into()));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let mut spec = fft_real(&centered);
    let half = n.div_ceil(2);
    for c in spec.iter_mut().take(half).skip(1) {
        *c *= 2.0;
    }
    // Bins above the Nyquist index are negative frequencies; an even-length
    // transform keeps its Nyquist bin unchanged.
    let first_negative = n / 2 + 1;
    for c in spec.iter_mut().skip(first_negative) {
        *c = Complex64::new(0.0, 0.0);
    }
    fft_in_place(&mut spec, true);
    Ok(spec.iter().map(|z| wrap_phase(z.arg())).collect())
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// |mean sign(wrap(px − py))| with sign(0) = 0.
pub fn pli_pair(px: &[f64], py: &[f64]) -> Result<f64> {
    if px.len() != py.len() {
        return Err(Error::LengthMismatch {
            left: px.len(),
            right: py.len(),
        });
    }
    if px.len() < MIN_PHASE_LEN {
        return Err(Error::SignalTooShort {
            len: px.len(),
            needed: MIN_PHASE_LEN,
        });
    }
    let s: f64 = px.iter().zip(py).map(|(a, b)| sign(wrap_phase(a - b))).sum();
    Ok((s / px.len() as f64).abs())
}

/// A 16×16 symmetric PLI matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityMatrix {
    pub values: Array2<f64>,
}

impl ConnectivityMatrix {
    pub fn zeros() -> Self {
        ConnectivityMatrix {
            values: Array2::zeros((N_CHANNELS, N_CHANNELS)),
        }
    }

    pub fn from_values(values: Array2<f64>) -> Result<Self> {
        let m = ConnectivityMatrix { values };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.dim() != (N_CHANNELS, N_CHANNELS) {
            return Err(Error::Schema(format!(
                "connectivity matrix must be {N_CHANNELS}x{N_CHANNELS}, got {:?}",
                self.values.dim()
            )));
        }
        for (i, ci) in CHANNELS.iter().enumerate() {
            if self.values[[i, i]] != 0.0 {
                return Err(Error::Schema(format!("nonzero diagonal at {ci}")));
            }
            for (j, cj) in CHANNELS.iter().enumerate() {
                let v = self.values[[i, j]];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Schema(format!("entry {ci}-{cj} = {v} outside [0, 1]")));
                }
                if v != self.values[[j, i]] {
                    return Err(Error::Schema(format!("asymmetric entry {ci}-{cj}")));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, a: &str, b: &str) -> Result<f64> {
        let layout = crate::layout::ChannelLayout::canonical();
        Ok(self.values[[layout.index_of(a)?, layout.index_of(b)?]])
    }

    /// CSV with a channel-name header row and a leading channel-name column.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend(CHANNELS.iter().map(|c| c.to_string()));
        w.write_record(&header).map_err(csv_err)?;
        for (i, row) in self.values.outer_iter().enumerate() {
            let mut rec = vec![CHANNELS[i].to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = r.headers().map_err(csv_err)?.clone();
        let cols: Vec<&str> = header.iter().skip(1).collect();
        if cols != CHANNELS {
            return Err(Error::Schema("matrix header must list the canonical channels".into()));
        }
        let mut values = Array2::zeros((N_CHANNELS, N_CHANNELS));
        let mut rows = 0;
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            if i >= N_CHANNELS || rec.get(0) != Some(CHANNELS[i]) || rec.len() != N_CHANNELS + 1 {
                return Err(Error::Schema(format!("unexpected matrix row {}", i + 1)));
            }
            for j in 0..N_CHANNELS {
                values[[i, j]] = rec[j + 1].trim().parse().map_err(|e| Error::Parse {
                    row: i as u64 + 2,
                    column: CHANNELS[j].to_string(),
                    message: format!("{e}"),
                })?;
            }
            rows += 1;
        }
        if rows != N_CHANNELS {
            return Err(Error::Schema(format!("matrix has {rows} rows, expected {N_CHANNELS}")));
        }
        ConnectivityMatrix::from_values(values)
    }
}

fn csv_err(e: csv::Error) -> Error {
    let row = e.position().map(|p| p.line()).unwrap_or(0);
    Error::Parse {
        row,
        column: String::new(),
        message: e.to_string(),
    }
}

/// Number of samples ignored at each end of an `n`-sample phase series.
pub fn trim_len(n: usize) -> usize {
    (EDGE_TRIM * n as f64).floor() as usize
}

pub fn pli_matrix(epoch: &Epoch) -> Result<ConnectivityMatrix> {
    epoch.validate()?;
    let n = epoch.len();
    let trim = trim_len(n);
    let mut phases = Vec::with_capacity(N_CHANNELS);
    for (c, name) in CHANNELS.iter().enumerate() {
        let x = epoch.channel(c).to_vec();
        let p = analytic_phase(&x).with_context(|| format!("channel {name}"))?;
        phases.push(p);
    }
    let mut values = Array2::zeros((N_CHANNELS, N_CHANNELS));
    for i in 0..N_CHANNELS {
        for j in (i + 1)..N_CHANNELS {
            let v = pli_pair(&phases[i][trim..n - trim], &phases[j][trim..n - trim])
                .with_context(|| format!("edge {}-{}", CHANNELS[i], CHANNELS[j]))?;
            values[[i, j]] = v;
            values[[j, i]] = v;
        }
    }
    Ok(ConnectivityMatrix { values })
}

/// PLI matrix of a band-limited copy of the epoch.
pub fn pli_matrix_band(epoch: &Epoch, lo: f64, hi: f64, taps: usize) -> Result<ConnectivityMatrix> {
    let mut e = epoch.clone();
    e.bandpass(lo, hi, taps)?;
    pli_matrix(&e)
}

/// `pli:A-B` for every unordered channel pair, row-major upper triangle.
pub fn edge_names() -> Vec<String> {
    edge_pairs()
        .into_iter()
        .map(|(i, j)| format!("pli:{}-{}", CHANNELS[i], CHANNELS[j]))
        .collect()
}

pub fn edge_pairs() -> Vec<(usize, usize)> {
    (0..N_CHANNELS)
        .flat_map(|i| ((i + 1)..N_CHANNELS).map(move |j| (i, j)))
        .collect()
}

/// Channel indices of an edge feature name such as `pli:C3-P3`.
pub fn parse_edge_name(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix("pli:")?;
    let (a, b) = rest.split_once('-')?;
    let layout = crate::layout::ChannelLayout::canonical();
    Some((layout.index_of(a).ok()?, layout.index_of(b).ok()?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl EdgeVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

pub fn vectorize_upper(m: &ConnectivityMatrix) -> EdgeVector {
    EdgeVector {
        names: edge_names(),
        values: edge_pairs().into_iter().map(|(i, j)| m.values[[i, j]]).collect(),
    }
}

pub fn reassemble(v: &EdgeVector) -> Result<ConnectivityMatrix> {
    if v.values.len() != N_EDGES {
        return Err(Error::ArityMismatch {
            expected: N_EDGES,
            got: v.values.len(),
        });
    }
    let mut values = Array2::zeros((N_CHANNELS, N_CHANNELS));
    for ((i, j), &x) in edge_pairs().into_iter().zip(&v.values) {
        values[[i, j]] = x;
        values[[j, i]] = x;
    }
    ConnectivityMatrix::from_values(values)
}

/// Element-wise mean of several matrices.
pub fn mean_matrix(ms: &[ConnectivityMatrix]) -> Result<ConnectivityMatrix> {
    if ms.is_empty() {
        return Err(Error::InsufficientData {
            available: 0,
            needed: 1,
        });
    }
    let mut acc = Array2::zeros((N_CHANNELS, N_CHANNELS));
    for m in ms {
        acc += &m.values;
    }
    acc /= ms.len() as f64;
    // Averaging in the same order on both triangles keeps exact symmetry.
    Ok(ConnectivityMatrix { values: acc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::Label;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal, Uniform};

    const FS: f64 = 250.0;

    fn tone(f: f64, n: usize, phase: f64) -> Vec<f64> {
        (0..n).map(|i| (2.0 * PI * f * i as f64 / FS + phase).cos()).collect()
    }

    fn white(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| StandardNormal.sample(rng)).collect()
    }

    fn epoch_from(rows: Vec<Vec<f64>>) -> Epoch {
        let n = rows[0].len();
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Epoch {
            subject_id: "s".into(),
            label: Label::Nc,
            fs: FS,
            samples: Array2::from_shape_vec((N_CHANNELS, n), flat).unwrap(),
            epoch_index: 0,
        }
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((wrap_phase(0.3) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn cosine_phase_tracks_time() {
        let n = 500;
        let p = analytic_phase(&tone(10.0, n, 0.0)).unwrap();
        let t = trim_len(n);
        let worst = (t..n - t)
            .map(|i| wrap_phase(p[i] - 2.0 * PI * 10.0 * i as f64 / FS).abs())
            .fold(0.0, f64::max);
        assert!(worst < 0.05, "{worst}");
    }

    // Non-integer cycle count exercises the edge error the trim protects against.
    #[test]
    fn off_bin_cosine_interior_is_accurate() {
        let n = 500;
        let p = analytic_phase(&tone(10.3, n, 0.0)).unwrap();
        let t = trim_len(n);
        let worst = (t..n - t)
            .map(|i| wrap_phase(p[i] - 2.0 * PI * 10.3 * i as f64 / FS).abs())
            .fold(0.0, f64::max);
        assert!(worst < 0.05, "{worst}");
    }

    #[test]
    fn quadrature_pair_differs_by_quarter_turn() {
        let n = 500;
        let s: Vec<f64> = (0..n).map(|i| (2.0 * PI * 10.0 * i as f64 / FS).sin()).collect();
        let c = tone(10.0, n, 0.0);
        let (ps, pc) = (analytic_phase(&s).unwrap(), analytic_phase(&c).unwrap());
        let t = trim_len(n);
        for i in t..n - t {
            assert!((wrap_phase(ps[i] - pc[i]) + PI / 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn odd_length_phase() {
        let n = 501;
        let p = analytic_phase(&tone(10.0, n, 0.4)).unwrap();
        assert_eq!(p.len(), n);
        assert!(p.iter().all(|v| *v > -PI && *v <= PI));
    }

    #[test]
    fn phase_errors() {
        assert!(matches!(analytic_phase(&[2.0; 64]), Err(Error::DegenerateSignal(_))));
        assert!(matches!(analytic_phase(&[1.0, 2.0]), Err(Error::SignalTooShort { .. })));
        assert!(matches!(
            pli_pair(&[0.0; 20], &[0.0; 21]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn pli_trivial_cases() {
        let p: Vec<f64> = (0..100).map(|i| wrap_phase(i as f64 * 0.3)).collect();
        assert_eq!(pli_pair(&p, &p).unwrap(), 0.0);
        let q: Vec<f64> = p.iter().map(|v| v - PI / 4.0).collect();
        assert_eq!(pli_pair(&p, &q).unwrap(), 1.0);
        assert_eq!(pli_pair(&q, &p).unwrap(), 1.0);
    }

    // Oracle: E|mean of N fair signs| ~ sqrt(2 / (π N)).
    #[test]
    fn random_phase_differences_give_small_pli() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = Uniform::new(-PI, PI).unwrap();
        let n = 500;
        let trials = 2000;
        let zeros = vec![0.0; n];
        let mean: f64 = (0..trials)
            .map(|_| {
                let d: Vec<f64> = (0..n).map(|_| u.sample(&mut rng)).collect();
                pli_pair(&d, &zeros).unwrap()
            })
            .sum::<f64>()
            / trials as f64;
        let expected = (2.0 / (PI * n as f64)).sqrt();
        assert!((mean / expected - 1.0).abs() < 0.2, "{mean} vs {expected}");
    }

    #[test]
    fn identical_channels_give_zero_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = white(&mut rng, 500);
        let m = pli_matrix(&epoch_from(vec![x; N_CHANNELS])).unwrap();
        assert!(m.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lagged_pair_is_strongly_coupled() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 500;
        let mut rows: Vec<Vec<f64>> = (0..N_CHANNELS).map(|_| white(&mut rng, n)).collect();
        rows[4] = tone(10.0, n, 0.0);
        rows[6] = tone(10.0, n, -PI / 4.0);
        let m = pli_matrix(&epoch_from(rows)).unwrap();
        m.validate().unwrap();
        assert!(m.get("C3", "P3").unwrap() > 0.9);
        let others: Vec<f64> = edge_pairs()
            .into_iter()
            .filter(|&p| p != (4, 6))
            .map(|(i, j)| m.values[[i, j]])
            .collect();
        assert!(others.iter().all(|&v| v < 0.2), "{others:?}");
    }

    #[test]
    fn zero_lag_mixtures_are_discounted() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 100;
        let mut total = 0.0;
        for _ in 0..trials {
            let s = white(&mut rng, 500);
            let e1 = white(&mut rng, 500);
            let e2 = white(&mut rng, 500);
            let x: Vec<f64> = s.iter().zip(&e1).map(|(a, b)| a + 0.3 * b).collect();
            let y: Vec<f64> = s.iter().zip(&e2).map(|(a, b)| 1.5 * a + 0.3 * b).collect();
            let t = trim_len(500);
            let (px, py) = (analytic_phase(&x).unwrap(), analytic_phase(&y).unwrap());
            total += pli_pair(&px[t..500 - t], &py[t..500 - t]).unwrap();
        }
        assert!(total / (trials as f64) < 0.15, "{}", total / trials as f64);
    }

    #[test]
    fn pure_zero_lag_copy_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = white(&mut rng, 400);
        let y: Vec<f64> = x.iter().map(|v| 1.5 * v).collect();
        let (px, py) = (analytic_phase(&x).unwrap(), analytic_phase(&y).unwrap());
        assert!(pli_pair(&px, &py).unwrap() < 0.02);
    }

    #[test]
    fn constant_channel_error_names_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut rows: Vec<Vec<f64>> = (0..N_CHANNELS).map(|_| white(&mut rng, 200)).collect();
        rows[9] = vec![3.0; 200];
        let err = pli_matrix(&epoch_from(rows)).unwrap_err();
        assert!(err.to_string().contains("O2"), "{err}");
        assert!(matches!(err.root(), Error::DegenerateSignal(_)));
    }

    #[test]
    fn vectorize_names_and_single_entry() {
        let v = vectorize_upper(&ConnectivityMatrix::zeros());
        assert_eq!(v.values.len(), 120);
        assert!(v.values.iter().all(|&x| x == 0.0));
        assert_eq!(v.names[0], "pli:Fp1-Fp2");
        assert_eq!(v.names[119], "pli:T5-T6");

        let mut m = ConnectivityMatrix::zeros();
        m.values[[4, 6]] = 0.7;
        m.values[[6, 4]] = 0.7;
        let v = vectorize_upper(&m);
        let nz: Vec<&String> = v
            .names
            .iter()
            .zip(&v.values)
            .filter(|(_, &x)| x != 0.0)
            .map(|(n, _)| n)
            .collect();
        assert_eq!(nz, vec!["pli:C3-P3"]);
        assert_eq!(parse_edge_name("pli:C3-P3"), Some((4, 6)));
        assert_eq!(parse_edge_name("variance@C3"), None);
    }

    #[test]
    fn matrix_csv_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rows: Vec<Vec<f64>> = (0..N_CHANNELS).map(|_| white(&mut rng, 300)).collect();
        let m = pli_matrix(&epoch_from(rows)).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(",Fp1,Fp2,F3"));
        let back = ConnectivityMatrix::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn band_limited_matrix_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rows: Vec<Vec<f64>> = (0..N_CHANNELS).map(|_| white(&mut rng, 500)).collect();
        let m = pli_matrix_band(&epoch_from(rows), 8.0, 13.0, 101).unwrap();
        m.validate().unwrap();
    }

    fn phase_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-PI..PI, n)
    }

    proptest! {
        #[test]
        fn pli_symmetric_and_bounded(px in phase_vec(64), py in phase_vec(64)) {
            let a = pli_pair(&px, &py).unwrap();
            let b = pli_pair(&py, &px).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!((0.0..=1.0).contains(&a));
        }

        // Quarter-integer phases keep every sum and difference exact in binary.
        #[test]
        fn pli_common_phase_invariant(
            px in prop::collection::vec(-12i32..12, 64),
            py in prop::collection::vec(-12i32..12, 64),
            c in prop::collection::vec(-40i32..40, 64),
        ) {
            let q = |v: i32| v as f64 * 0.25;
            let a: Vec<f64> = px.iter().map(|&v| q(v)).collect();
            let b: Vec<f64> = py.iter().map(|&v| q(v)).collect();
            let ac: Vec<f64> = a.iter().zip(&c).map(|(x, &k)| x + q(k)).collect();
            let bc: Vec<f64> = b.iter().zip(&c).map(|(x, &k)| x + q(k)).collect();
            prop_assert_eq!(pli_pair(&a, &b).unwrap(), pli_pair(&ac, &bc).unwrap());
        }

        #[test]
        fn matrix_invariants_hold(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<Vec<f64>> = (0..N_CHANNELS).map(|_| white(&mut rng, 128)).collect();
            let m = pli_matrix(&epoch_from(rows)).unwrap();
            prop_assert!(m.validate().is_ok());
            prop_assert_eq!(reassemble(&vectorize_upper(&m)).unwrap(), m);
        }
    }
}
