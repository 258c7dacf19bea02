//! The DMX text format for density operators.
//!
//! ```text
//! DMX 1
//! dims: 2 2
//! # sparse Hermitian triplets: row col re im (0-based)
//! 0 0 0.5 0.0
//! 0 3 0.5 0.0
//! 3 3 0.5 0.0
//! ```
//!
//! `#` starts a comment. Entries whose conjugate transpose partner is
//! missing are filled by Hermitian completion, so writing one triangle is
//! enough; listing the same (row, col) twice is an error. Values are written
//! back with shortest round-trip formatting, so save followed by load
//! reproduces the matrix exactly.

use crate::error::{Error, Result};
use crate::hilbert::{DensityOperator, SiteDims, TRACE_TOL};
use crate::linalg::{Complex64, ComplexMatrix, HermitianMatrix};
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Check positive semidefiniteness (one eigensolve). On by default.
    pub validate_psd: bool,
    /// Rescale to unit trace instead of rejecting a trace deviation.
    pub renormalize: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self { validate_psd: true, renormalize: false }
    }
}

pub fn load_state(path: impl AsRef<Path>) -> Result<DensityOperator> {
    load_state_with(path, LoadOptions::default())
}

pub fn load_state_with(path: impl AsRef<Path>, opts: LoadOptions) -> Result<DensityOperator> {
    let text = std::fs::read_to_string(path)?;
    parse_state(&text, opts)
}

pub fn save_state(w: &DensityOperator, path: impl AsRef<Path>) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(format_state(w).as_bytes())?;
    Ok(())
}

pub fn parse_state(text: &str, opts: LoadOptions) -> Result<DensityOperator> {
    let mut dims: Option<SiteDims> = None;
    let mut saw_magic = false;
    let mut entries: HashMap<(usize, usize), Complex64> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if !saw_magic {
            if line != "DMX 1" {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected header 'DMX 1', found '{}'", line),
                });
            }
            saw_magic = true;
            continue;
        }
        if dims.is_none() {
            let rest = line.strip_prefix("dims:").ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected 'dims: d1 d2 ...', found '{}'", line),
            })?;
            let parsed: std::result::Result<Vec<usize>, _> =
                rest.split_whitespace().map(|t| t.parse::<usize>()).collect();
            let values = parsed.map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad dimension list '{}'", rest.trim()),
            })?;
            dims = Some(SiteDims::new(values)?);
            continue;
        }
        let d = dims.as_ref().expect("dims parsed").total();
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 'row col re im', found '{}'", line),
            });
        }
        let parse_idx = |t: &str, what: &str| -> Result<usize> {
            t.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad {} '{}'", what, t),
            })
        };
        let parse_val = |t: &str, what: &str| -> Result<f64> {
            let v: f64 = t.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad {} '{}'", what, t),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse { line: line_no, msg: format!("{} '{}' not finite", what, t) });
            }
            Ok(v)
        };
        let r = parse_idx(tokens[0], "row")?;
        let c = parse_idx(tokens[1], "col")?;
        let re = parse_val(tokens[2], "real part")?;
        let im = parse_val(tokens[3], "imaginary part")?;
        if r >= d || c >= d {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("index ({}, {}) out of range for dimension {}", r, c, d),
            });
        }
        if entries.insert((r, c), Complex64::new(re, im)).is_some() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate entry for ({}, {})", r, c),
            });
        }
    }

    if !saw_magic {
        return Err(Error::Parse { line: 1, msg: "missing 'DMX 1' header".into() });
    }
    let dims = dims.ok_or(Error::Parse { line: 2, msg: "missing 'dims:' line".into() })?;
    let d = dims.total();

    let mut m = ComplexMatrix::zeros(d, d);
    for (&(r, c), &z) in &entries {
        m.set(r, c, z);
        // Hermitian completion for entries given on one side only.
        if r != c && !entries.contains_key(&(c, r)) {
            m.set(c, r, z.conj());
        }
    }
    let h = HermitianMatrix::new(m)?;

    let tr = h.trace();
    let h = if opts.renormalize {
        if tr.abs() < 1e-6 {
            return Err(Error::InvalidDensity(format!("cannot renormalize trace {}", tr)));
        }
        HermitianMatrix::new(h.into_matrix().scale(Complex64::new(1.0 / tr, 0.0)))?
    } else {
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!(
                "trace {} deviates from 1 (use renormalize to rescale)",
                tr
            )));
        }
        h
    };

    if opts.validate_psd {
        DensityOperator::new(dims, h)
    } else {
        DensityOperator::new_unchecked(dims, h)
    }
}

/// Render the upper triangle (diagonal included) of the nonzero entries.
pub fn format_state(w: &DensityOperator) -> String {
    let d = w.dims().total();
    let mut out = String::from("DMX 1\n");
    out.push_str("dims:");
    for &x in w.dims().dims() {
        out.push_str(&format!(" {}", x));
    }
    out.push('\n');
    let m = w.matrix();
    for r in 0..d {
        for c in r..d {
            let z = m.get(r, c);
            if z.re != 0.0 || z.im != 0.0 {
                out.push_str(&format!("{} {} {:?} {:?}\n", r, c, z.re, z.im));
            }
        }
    }
    out
}
