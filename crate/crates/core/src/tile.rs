//! Binary tile format shared by slice and dynamical-plane rasters.
//!
//! Layout, little-endian: magic `CUBQ`, `u16` version, `λ` as two `f64`,
//! window `x0 y0 x1 y1` as four `f64`, resolution as two `u32`, then
//! `w·h` flag bytes and `w·h` `u16` component ids in row-major order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::basin::{CellFate, DynRaster};
use crate::classify::Budgets;
use crate::error::{Error, Result};
use crate::grid::{Resolution, Window};
use crate::slice::{HullStatus, SliceRaster};

pub const MAGIC: &[u8; 4] = b"CUBQ";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 4 + 2 + 16 + 32 + 8;

/// Dynamical-plane flag bits.
pub mod dyn_flag {
    pub const ESCAPED: u8 = 1 << 0;
    pub const TARGET: u8 = 1 << 1;
    pub const IMMEDIATE: u8 = 1 << 2;
    pub const BOUNDED: u8 = 1 << 3;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tile {
    pub lambda: Complex64,
    pub window: Window,
    pub resolution: Resolution,
    pub flags: Vec<u8>,
    pub component_ids: Vec<u16>,
}

impl Tile {
    pub fn encode(&self) -> Vec<u8> {
        let n = self.flags.len();
        let mut out = Vec::with_capacity(HEADER_LEN + 3 * n);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        for v in [self.lambda.re, self.lambda.im] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in [self.window.x0, self.window.y0, self.window.x1, self.window.y1] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&self.resolution.width.to_le_bytes());
        out.extend_from_slice(&self.resolution.height.to_le_bytes());
        out.extend_from_slice(&self.flags);
        for id in &self.component_ids {
            out.extend_from_slice(&id.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::TileFormat(m.to_string());
        if bytes.len() < HEADER_LEN {
            return Err(bad("truncated header"));
        }
        if &bytes[..4] != MAGIC {
            return Err(bad("bad magic"));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != VERSION {
            return Err(Error::TileFormat(format!("unsupported version {version}")));
        }
        let f = |k: usize| {
            let o = 6 + 8 * k;
            f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap())
        };
        let u = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let lambda = Complex64::new(f(0), f(1));
        let window = Window::new(f(2), f(3), f(4), f(5)).map_err(|e| Error::TileFormat(e.to_string()))?;
        let resolution =
            Resolution::new(u(HEADER_LEN - 8), u(HEADER_LEN - 4)).map_err(|e| Error::TileFormat(e.to_string()))?;
        let n = resolution.len();
        if bytes.len() != HEADER_LEN + 3 * n {
            return Err(Error::TileFormat(format!(
                "expected {} bytes, got {}",
                HEADER_LEN + 3 * n,
                bytes.len()
            )));
        }
        let flags = bytes[HEADER_LEN..HEADER_LEN + n].to_vec();
        let component_ids = bytes[HEADER_LEN + n..]
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect();
        Ok(Self {
            lambda,
            window,
            resolution,
            flags,
            component_ids,
        })
    }

    /// Hex SHA-256 of the encoded tile.
    pub fn content_hash(&self) -> String {
        hex(&Sha256::digest(self.encode()))
    }
}

impl From<&SliceRaster> for Tile {
    fn from(r: &SliceRaster) -> Self {
        Self {
            lambda: r.config.lambda,
            window: r.config.window,
            resolution: r.config.resolution,
            flags: r.flags.clone(),
            component_ids: r.component_ids.clone(),
        }
    }
}

impl Tile {
    pub fn from_dynamics(lambda: Complex64, r: &DynRaster) -> Self {
        let flags = r
            .fates
            .iter()
            .zip(&r.labels)
            .map(|(&fate, &label)| match fate {
                CellFate::Escaped => dyn_flag::ESCAPED,
                CellFate::Target if label == r.target_label => dyn_flag::TARGET | dyn_flag::IMMEDIATE,
                CellFate::Target => dyn_flag::TARGET,
                CellFate::Bounded => dyn_flag::BOUNDED,
            })
            .collect();
        let component_ids = r.labels.iter().map(|&l| l.min(u16::MAX as u32) as u16).collect();
        Self {
            lambda,
            window: r.grid.window,
            resolution: r.grid.resolution,
            flags,
            component_ids,
        }
    }
}

/// JSON metadata written next to a slice tile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSidecar {
    pub format_version: u16,
    pub code_version: String,
    pub lambda: Complex64,
    pub window: Window,
    pub resolution: Resolution,
    pub budgets: Budgets,
    pub closure_eps: f64,
    pub hull_status: HullStatus,
    pub component_count: u16,
    pub content_hash: String,
}

impl SliceSidecar {
    pub fn of(r: &SliceRaster) -> Self {
        Self {
            format_version: VERSION,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            lambda: r.config.lambda,
            window: r.config.window,
            resolution: r.config.resolution,
            budgets: r.config.budgets,
            closure_eps: r.config.closure_eps,
            hull_status: r.hull_status,
            component_count: r.component_ids.iter().copied().max().unwrap_or(0),
            content_hash: Tile::from(r).content_hash(),
        }
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
