//! File formats shared by the library and the command line.
//!
//! CSV: comma separated, LF line endings, one header row, reals in
//! scientific notation with 9 significant digits. JSON: reals written with
//! 17 significant digits so they round-trip exactly.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::analysis::WignerGrid;
use crate::design::SweepTable;
use crate::detector::JointClickDistribution;
use crate::error::{Error, Result};
use crate::fock::FockState;

/// Real number as written in CSV files.
pub fn csv_real(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.8e}")
    }
}

/// Compact JSON with every `f64` in `{:.16e}` form.
struct ScientificFormatter;

impl Formatter for ScientificFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes `value` as one line of JSON with round-trippable reals.
/// Non-finite reals become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ScientificFormatter);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[derive(Serialize, Deserialize)]
struct StateRecord {
    dim: usize,
    amplitudes: Vec<[f64; 2]>,
    tail_mass: f64,
}

/// `{ "dim": n, "amplitudes": [[re, im], ...], "tail_mass": t }`
pub fn state_to_json(s: &FockState) -> Result<String> {
    to_json(&StateRecord {
        dim: s.dim(),
        amplitudes: s.amplitudes().iter().map(|c| [c.re, c.im]).collect(),
        tail_mass: s.tail_mass(),
    })
}

pub fn state_from_json(text: &str) -> Result<FockState> {
    let rec: StateRecord = serde_json::from_str(text)?;
    if rec.dim != rec.amplitudes.len() {
        return Err(Error::DimensionMismatch(rec.dim, rec.amplitudes.len()));
    }
    let amps = rec.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
    FockState::from_raw_parts(amps, rec.tail_mass)
}

pub fn write_sweep_csv<W: Write + ?Sized>(w: &mut W, t: &SweepTable) -> io::Result<()> {
    writeln!(w, "{}", t.header().join(","))?;
    for row in &t.rows {
        let mut cells: Vec<String> = row.parameters.iter().map(|v| csv_real(*v)).collect();
        cells.push(csv_real(row.metric));
        cells.push(csv_real(row.success_prob));
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// `x,p,w`, one row per grid point with `p` varying fastest.
pub fn write_wigner_csv<W: Write + ?Sized>(w: &mut W, g: &WignerGrid) -> io::Result<()> {
    writeln!(w, "x,p,w")?;
    for i in 0..g.spec.nx {
        let x = csv_real(g.spec.x(i));
        for j in 0..g.spec.np {
            writeln!(w, "{x},{},{}", csv_real(g.spec.p(j)), csv_real(g.get(i, j)))?;
        }
    }
    Ok(())
}

/// Binary 16-bit PGM: `x` along columns, `p` decreasing down the rows, and
/// `[min, max]` of the grid mapped linearly onto `0..=65535`.
pub fn write_wigner_pgm<W: Write + ?Sized>(w: &mut W, g: &WignerGrid) -> io::Result<()> {
    let (lo, hi) = (g.min(), g.max());
    let span = hi - lo;
    write!(w, "P5\n{} {}\n65535\n", g.spec.nx, g.spec.np)?;
    let mut buf = Vec::with_capacity(2 * g.values.len());
    for j in (0..g.spec.np).rev() {
        for i in 0..g.spec.nx {
            let level = if span > 0.0 {
                ((g.get(i, j) - lo) / span * 65535.0).round().clamp(0.0, 65535.0) as u16
            } else {
                0
            };
            buf.extend_from_slice(&level.to_be_bytes());
        }
    }
    w.write_all(&buf)
}

/// `i,j,p` with `i` herald-arm clicks and `j` signal-arm clicks.
pub fn write_joint_csv<W: Write + ?Sized>(w: &mut W, d: &JointClickDistribution) -> io::Result<()> {
    writeln!(w, "i,j,p")?;
    for (i, row) in d.probabilities.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            writeln!(w, "{i},{j},{}", csv_real(*p))?;
        }
    }
    Ok(())
}

/// `r2,i,j,p` for a reflectivity scan of joint click distributions.
pub fn write_joint_scan_csv<W: Write + ?Sized>(w: &mut W, scan: &[(f64, JointClickDistribution)]) -> io::Result<()> {
    writeln!(w, "r2,i,j,p")?;
    for (r2, d) in scan {
        let r2 = csv_real(*r2);
        for (i, row) in d.probabilities.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                writeln!(w, "{r2},{i},{j},{}", csv_real(*p))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{wigner, GridSpec};
    use crate::catalysis::{pcoc_state, CatalysisConfig};
    use proptest::prelude::*;

    #[test]
    fn csv_number_format() {
        assert_eq!(csv_real(0.5), "5.00000000e-1");
        assert_eq!(csv_real(-1234.5), "-1.23450000e3");
        assert_eq!(csv_real(f64::NAN), "nan");
    }

    #[test]
    fn state_round_trip() {
        let s = pcoc_state(&CatalysisConfig::real(2.0, 0.5, 2).unwrap()).unwrap().state;
        let text = state_to_json(&s).unwrap();
        assert!(text.starts_with("{\"dim\":"));
        assert!(text.ends_with('\n'));
        let back = state_from_json(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn state_json_rejects_inconsistent_dim() {
        let text = r#"{"dim":3,"amplitudes":[[1.0,0.0]],"tail_mass":0.0}"#;
        assert!(matches!(state_from_json(text), Err(Error::DimensionMismatch(3, 1))));
        assert!(matches!(state_from_json("{"), Err(Error::Json(_))));
    }

    #[test]
    fn non_finite_reals_become_null() {
        assert_eq!(to_json(&[f64::NAN, 1.0]).unwrap(), "[null,1.0000000000000000e0]\n");
    }

    #[test]
    fn wigner_files() {
        let g = wigner(&FockState::fock(1, 3).unwrap(), &GridSpec::symmetric(2.0, 5)).unwrap();
        let mut csv = Vec::new();
        write_wigner_csv(&mut csv, &g).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 26);
        assert!(!text.contains('\r'));
        assert!(text.starts_with("x,p,w\n-1.60000000e0,-1.60000000e0,"));

        let mut pgm = Vec::new();
        write_wigner_pgm(&mut pgm, &g).unwrap();
        let header = b"P5\n5 5\n65535\n";
        assert_eq!(&pgm[..header.len()], header);
        assert_eq!(pgm.len(), header.len() + 50);
        // the origin holds the minimum of |1>
        let centre = header.len() + 2 * (2 * 5 + 2);
        assert_eq!(&pgm[centre..centre + 2], &[0, 0]);
    }

    proptest! {
        #[test]
        fn json_reals_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let text = to_json(&v).unwrap();
            let back: f64 = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.to_bits(), v.to_bits());
        }
    }
}
