//! `NormReport` and deterministic serialization: JSON floats carry 17
//! significant digits, CSV floats use the shortest round-trip form.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsRecord {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub transition_order: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct BbmoRow {
    pub j0: u32,
    pub value: f64,
    pub tail: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlimRow {
    pub m: u32,
    pub t: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlowupRow {
    pub slope: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NinftyRow {
    pub t: f64,
    pub bound: f64,
    /// `None` when the scale is too fine for the grid budget.
    pub grid_value: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Claims {
    #[serde(rename = "B.BMO")]
    pub bbmo: Verdict,
    #[serde(rename = "B.lim-fails")]
    pub blim_fails: Verdict,
    #[serde(rename = "N-infty")]
    pub n_infty: Verdict,
    #[serde(rename = "div-free")]
    pub div_free: Verdict,
}

impl Claims {
    pub fn all_pass(&self) -> bool {
        [self.bbmo, self.blim_fails, self.n_infty, self.div_free]
            .iter()
            .all(|v| *v == Verdict::Pass)
    }
}

/// Supporting values kept out of the serialized report.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub failures: Vec<String>,
    pub periodization_sup: f64,
    pub limit_constant: f64,
    pub sup_norm_exponent: f64,
    pub divergence_grid: usize,
    pub divergence_scale: i32,
    pub spot_check_max: f64,
    pub u1_recovery_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub params: ParamsRecord,
    pub bbmo: Vec<BbmoRow>,
    pub blim: Vec<BlimRow>,
    pub blowup: BlowupRow,
    pub ninfty: Vec<NinftyRow>,
    pub divergence_residual: f64,
    pub claims: Claims,
    #[serde(skip)]
    pub diagnostics: Diagnostics,
}

impl NormReport {
    pub fn to_json(&self) -> String {
        to_json_17(self)
    }

    /// `t,c` rows of the fixed-time blow-up curve.
    pub fn blim_csv(&self) -> String {
        let mut out = String::from("m,t,c\n");
        for r in &self.blim {
            out.push_str(&format!("{},{:?},{:?}\n", r.m, r.t, r.c));
        }
        out
    }

    /// `j0,S` rows of the Carleson table.
    pub fn bbmo_csv(&self) -> String {
        let mut out = String::from("j0,value,tail\n");
        for r in &self.bbmo {
            out.push_str(&format!("{},{:?},{:?}\n", r.j0, r.value, r.tail));
        }
        out
    }
}

/// Pretty printer that writes every float as `{:.16e}`.
struct Fixed17 {
    inner: PrettyFormatter<'static>,
}

impl Formatter for Fixed17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{:.16e}", v as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Pretty JSON with 17-significant-digit floats; non-finite floats are
/// written as `null`.
pub fn to_json_17<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let fmt = Fixed17 {
        inner: PrettyFormatter::new(),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_17_digits() {
        let s = to_json_17(&vec![0.1, 1.0, f64::NAN]);
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("1.0000000000000000e0"));
        assert!(s.contains("null"));
        let back: Vec<Option<f64>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![Some(0.1), Some(1.0), None]);
    }

    #[test]
    fn claim_keys() {
        let c = Claims {
            bbmo: Verdict::Pass,
            blim_fails: Verdict::Pass,
            n_infty: Verdict::Fail,
            div_free: Verdict::Pass,
        };
        let s = to_json_17(&c);
        assert!(s.contains("\"B.lim-fails\": \"pass\""));
        assert!(s.contains("\"N-infty\": \"fail\""));
        assert!(!c.all_pass());
    }
}
