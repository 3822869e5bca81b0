//! JSON emission with a fixed number of significant digits per float.

use heislab::fmt::fmt_sig;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// A float serialized with `D` significant digits. Non-finite values become
/// `null`.
#[derive(Clone, Copy, Debug)]
pub struct Sig<const D: usize>(pub f64);

pub type Num = Sig<17>;

impl<const D: usize> Serialize for Sig<D> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let text = if self.0.is_finite() {
            fmt_sig(self.0, D)
        } else {
            "null".to_string()
        };
        let raw = RawValue::from_string(text).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

pub fn pair(p: (f64, f64)) -> [Num; 2] {
    [Sig(p.0), Sig(p.1)]
}

pub fn to_line<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec(value).expect("records serialize");
    out.push(b'\n');
    out
}
