//! Framed binary checkpoints with bit-exact round trips.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! offset  size  field
//! 0       7     magic  "DDUET01"
//! 7       2     format version (u16) = 1
//! 9       1     system tag (u8): 1 = zakharov, 2 = kgs
//! 10      1     dimension (u8): 1 or 3
//! 11      ...   per axis: point count (u64), period (f64)
//! ...     1     coupling count (u8): 1 (zakharov sign) or 3 (kgs α, β, γ)
//! ...     ...   couplings (f64 × count)
//! ...     8     simulation time (f64)
//! ...     ...   payload: Re u, Im u, n, ∂ₜn — each total-points f64,
//!               physical representation, z-fastest in 3d
//! ```
//!
//! The wave pair is stored through its real part, which is the invariant
//! the solvers maintain; `u` keeps both components.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use dduet_core::field::{Field, WavePair};
use dduet_core::grid::{Grid, Grid1D, Grid3D};
use dduet_core::kgs::{Couplings, KGSState};
use dduet_core::zakharov::ZakharovState;

pub const MAGIC: &[u8; 7] = b"DDUET01";
pub const FORMAT_VERSION: u16 = 1;

const TAG_ZAKHAROV: u8 = 1;
const TAG_KGS: u8 = 2;

#[derive(Debug)]
pub enum CheckpointError {
    BadMagic,
    VersionMismatch { found: u16 },
    DimsMismatch { detail: String },
    SystemMismatch { found: &'static str, expected: &'static str },
    Io(std::io::Error),
}

impl std::fmt::Display for CheckpointError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::BadMagic => write!(f, "not a dduet checkpoint (bad magic)"),
            Self::VersionMismatch { found } => {
                write!(f, "checkpoint format version {found} (supported: {FORMAT_VERSION})")
            }
            Self::DimsMismatch { detail } => write!(f, "dims mismatch: {detail}"),
            Self::SystemMismatch { found, expected } => {
                write!(f, "checkpoint holds a {found} state, expected {expected}")
            }
            Self::Io(e) => write!(f, "checkpoint io: {e}"),
        }
    }
}

impl std::error::Error for CheckpointError {}

impl From<std::io::Error> for CheckpointError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

/// A state of either system, as stored on disk.
pub enum CheckpointState {
    Zakharov(ZakharovState),
    Kgs(KGSState),
}

impl CheckpointState {
    pub fn system_name(&self) -> &'static str {
        match self {
            Self::Zakharov(_) => "zakharov",
            Self::Kgs(_) => "kgs",
        }
    }
}

struct Writer<W: Write> {
    sink: W,
}

impl<W: Write> Writer<W> {
    fn u8(&mut self, v: u8) -> std::io::Result<()> {
        self.sink.write_all(&[v])
    }
    fn u16(&mut self, v: u16) -> std::io::Result<()> {
        self.sink.write_all(&v.to_le_bytes())
    }
    fn u64(&mut self, v: u64) -> std::io::Result<()> {
        self.sink.write_all(&v.to_le_bytes())
    }
    fn f64(&mut self, v: f64) -> std::io::Result<()> {
        self.sink.write_all(&v.to_le_bytes())
    }
    fn f64_slice(&mut self, vs: impl Iterator<Item = f64>) -> std::io::Result<()> {
        for v in vs {
            self.f64(v)?;
        }
        Ok(())
    }
}

struct Reader<R: Read> {
    source: R,
}

impl<R: Read> Reader<R> {
    fn u8(&mut self) -> std::io::Result<u8> {
        let mut b = [0u8; 1];
        self.source.read_exact(&mut b)?;
        Ok(b[0])
    }
    fn u16(&mut self) -> std::io::Result<u16> {
        let mut b = [0u8; 2];
        self.source.read_exact(&mut b)?;
        Ok(u16::from_le_bytes(b))
    }
    fn u64(&mut self) -> std::io::Result<u64> {
        let mut b = [0u8; 8];
        self.source.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }
    fn f64(&mut self) -> std::io::Result<f64> {
        let mut b = [0u8; 8];
        self.source.read_exact(&mut b)?;
        Ok(f64::from_le_bytes(b))
    }
    fn f64_vec(&mut self, len: usize) -> std::io::Result<Vec<f64>> {
        (0..len).map(|_| self.f64()).collect()
    }
}

fn payload<G: Grid>(
    w: &mut Writer<impl Write>,
    u: &Field<G>,
    wave: &WavePair<G>,
) -> std::io::Result<()> {
    let u = u.to_physical();
    let n = wave.n.to_physical();
    let nt = wave.nt.to_physical();
    w.f64_slice(u.data().iter().map(|v| v.re))?;
    w.f64_slice(u.data().iter().map(|v| v.im))?;
    w.f64_slice(n.data().iter().map(|v| v.re))?;
    w.f64_slice(nt.data().iter().map(|v| v.re))?;
    Ok(())
}

pub fn save_checkpoint(state: &CheckpointState, path: &Path) -> Result<(), CheckpointError> {
    let file = std::fs::File::create(path)?;
    let mut w = Writer { sink: std::io::BufWriter::new(file) };
    w.sink.write_all(MAGIC)?;
    w.u16(FORMAT_VERSION)?;
    match state {
        CheckpointState::Zakharov(s) => {
            w.u8(TAG_ZAKHAROV)?;
            w.u8(1)?;
            let grid = s.grid();
            w.u64(grid.n_points() as u64)?;
            w.f64(grid.period())?;
            w.u8(1)?;
            w.f64(s.coupling)?;
            w.f64(s.time)?;
            payload(&mut w, &s.u, &s.wave)?;
        }
        CheckpointState::Kgs(s) => {
            w.u8(TAG_KGS)?;
            w.u8(3)?;
            let grid = s.grid();
            for a in 0..3 {
                w.u64(grid.shape()[a] as u64)?;
                w.f64(grid.periods()[a])?;
            }
            w.u8(3)?;
            w.f64(s.couplings.alpha)?;
            w.f64(s.couplings.beta)?;
            w.f64(s.couplings.gamma)?;
            w.f64(s.time)?;
            payload(&mut w, &s.u, &s.wave)?;
        }
    }
    w.sink.flush()?;
    Ok(())
}

fn complex_field<G: Grid>(
    grid: &std::sync::Arc<G>,
    re: Vec<f64>,
    im: Option<Vec<f64>>,
) -> Field<G> {
    let data: Vec<Complex64> = match im {
        Some(im) => re.into_iter().zip(im).map(|(r, i)| Complex64::new(r, i)).collect(),
        None => re.into_iter().map(|r| Complex64::new(r, 0.0)).collect(),
    };
    Field::from_physical(grid, data)
}

pub fn load_checkpoint(path: &Path) -> Result<CheckpointState, CheckpointError> {
    let file = std::fs::File::open(path)?;
    let mut r = Reader { source: std::io::BufReader::new(file) };
    let mut magic = [0u8; 7];
    if r.source.read_exact(&mut magic).is_err() || &magic != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(CheckpointError::VersionMismatch { found: version });
    }
    let tag = r.u8()?;
    let dim = r.u8()?;
    let expected_dim = match tag {
        TAG_ZAKHAROV => 1,
        TAG_KGS => 3,
        _ => return Err(CheckpointError::DimsMismatch { detail: format!("bad tag {tag}") }),
    };
    if dim != expected_dim {
        return Err(CheckpointError::DimsMismatch {
            detail: format!("dim {dim} for tag {tag}"),
        });
    }

    let mut ns = Vec::new();
    let mut periods = Vec::new();
    for _ in 0..dim {
        let n = r.u64()? as usize;
        if n < 4 || !n.is_power_of_two() || n > (1 << 24) {
            return Err(CheckpointError::DimsMismatch { detail: format!("axis size {n}") });
        }
        ns.push(n);
        let p = r.f64()?;
        if !(p > 0.0 && p.is_finite()) {
            return Err(CheckpointError::DimsMismatch { detail: format!("period {p}") });
        }
        periods.push(p);
    }
    let n_couplings = r.u8()? as usize;
    let couplings = r.f64_vec(n_couplings)?;
    let time = r.f64()?;

    let total: usize = ns.iter().product();
    let read_payload = |r: &mut Reader<std::io::BufReader<std::fs::File>>| -> Result<[Vec<f64>; 4], CheckpointError> {
        let u_re = r.f64_vec(total).map_err(|_| CheckpointError::DimsMismatch {
            detail: "payload shorter than the header dims".into(),
        })?;
        let u_im = r.f64_vec(total).map_err(|_| CheckpointError::DimsMismatch {
            detail: "payload shorter than the header dims".into(),
        })?;
        let n = r.f64_vec(total).map_err(|_| CheckpointError::DimsMismatch {
            detail: "payload shorter than the header dims".into(),
        })?;
        let nt = r.f64_vec(total).map_err(|_| CheckpointError::DimsMismatch {
            detail: "payload shorter than the header dims".into(),
        })?;
        let mut probe = [0u8; 1];
        if r.source.read(&mut probe)? != 0 {
            return Err(CheckpointError::DimsMismatch {
                detail: "trailing bytes after the payload".into(),
            });
        }
        Ok([u_re, u_im, n, nt])
    };

    match tag {
        TAG_ZAKHAROV => {
            if n_couplings != 1 {
                return Err(CheckpointError::DimsMismatch {
                    detail: format!("{n_couplings} couplings for a zakharov state"),
                });
            }
            let [u_re, u_im, n, nt] = read_payload(&mut r)?;
            let grid = Grid1D::new(ns[0], periods[0]);
            let state = ZakharovState::new(
                time,
                complex_field(&grid, u_re, Some(u_im)),
                WavePair::new(complex_field(&grid, n, None), complex_field(&grid, nt, None)),
            )
            .with_coupling(couplings[0]);
            Ok(CheckpointState::Zakharov(state))
        }
        TAG_KGS => {
            if n_couplings != 3 {
                return Err(CheckpointError::DimsMismatch {
                    detail: format!("{n_couplings} couplings for a kgs state"),
                });
            }
            let [u_re, u_im, n, nt] = read_payload(&mut r)?;
            let grid = Grid3D::new(
                [ns[0], ns[1], ns[2]],
                [periods[0], periods[1], periods[2]],
            );
            let state = KGSState::new(
                time,
                complex_field(&grid, u_re, Some(u_im)),
                WavePair::new(complex_field(&grid, n, None), complex_field(&grid, nt, None)),
                Couplings { alpha: couplings[0], beta: couplings[1], gamma: couplings[2] },
            );
            Ok(CheckpointState::Kgs(state))
        }
        _ => unreachable!(),
    }
}

pub fn load_zakharov(path: &Path) -> Result<ZakharovState, CheckpointError> {
    match load_checkpoint(path)? {
        CheckpointState::Zakharov(s) => Ok(s),
        other => Err(CheckpointError::SystemMismatch {
            found: other.system_name(),
            expected: "zakharov",
        }),
    }
}

pub fn load_kgs(path: &Path) -> Result<KGSState, CheckpointError> {
    match load_checkpoint(path)? {
        CheckpointState::Kgs(s) => Ok(s),
        other => {
            Err(CheckpointError::SystemMismatch { found: other.system_name(), expected: "kgs" })
        }
    }
}

/// Recomputed integrity facts about a stored state; `verify` prints these.
pub struct VerifyReport {
    pub system: &'static str,
    pub time: f64,
    pub finite: bool,
    /// Relative mismatch of the physical and spectral L² quadratures.
    pub parseval_residual: f64,
    /// Max |f − F⁻¹F f| over the u component, relative.
    pub round_trip_residual: f64,
    pub mass: f64,
    pub wave_norm: f64,
    pub hamiltonian: Option<f64>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.finite && self.parseval_residual < 1e-12 && self.round_trip_residual < 1e-12
    }
}

fn residuals<G: Grid>(u: &Field<G>) -> (f64, f64) {
    let phys = u.to_physical();
    let spec = phys.to_spectral();
    let parseval = (phys.l2_norm() - spec.l2_norm()).abs() / phys.l2_norm().max(f64::MIN_POSITIVE);
    let back = spec.to_physical();
    let round = phys
        .data()
        .iter()
        .zip(back.data())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / phys.max_abs().max(f64::MIN_POSITIVE);
    (parseval, round)
}

pub fn verify_state(state: &CheckpointState) -> VerifyReport {
    match state {
        CheckpointState::Zakharov(s) => {
            let (parseval, round) = residuals(&s.u);
            VerifyReport {
                system: "zakharov",
                time: s.time,
                finite: s.u.is_finite() && s.wave.n.is_finite() && s.wave.nt.is_finite(),
                parseval_residual: parseval,
                round_trip_residual: round,
                mass: dduet_core::mass(&s.u),
                wave_norm: s.wave.w_norm(),
                hamiltonian: dduet_core::zakharov::hamiltonian(s).ok(),
            }
        }
        CheckpointState::Kgs(s) => {
            let (parseval, round) = residuals(&s.u);
            VerifyReport {
                system: "kgs",
                time: s.time,
                finite: s.u.is_finite() && s.wave.n.is_finite() && s.wave.nt.is_finite(),
                parseval_residual: parseval,
                round_trip_residual: round,
                mass: dduet_core::mass(&s.u),
                wave_norm: s.wave.g_norm(),
                hamiltonian: dduet_core::kgs::hamiltonian(s).ok(),
            }
        }
    }
}
