//! Control parameter vector type.

use std::fmt;
use std::ops::{Add, Index, Sub};

use nalgebra::DVector;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::Error;

/// Parameter vector θ (also used for θ̂, θ* and dither samples).
///
/// Non-empty with all entries finite, enforced at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVec(DVector<f64>);

impl ParamVec {
    pub fn new(values: Vec<f64>) -> Result<Self, Error> {
        if values.is_empty() {
            return Err(Error::config("parameter vector must have at least one entry"));
        }
        crate::ensure_finite(&values, "parameter vector entry")?;
        Ok(ParamVec(DVector::from_vec(values)))
    }

    /// All-zero vector of dimension `n >= 1`.
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "parameter vector must have at least one entry");
        ParamVec(DVector::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }

    pub fn from_vector(v: DVector<f64>) -> Result<Self, Error> {
        Self::new(v.as_slice().to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.0.iter()
    }
}

impl Index<usize> for ParamVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add<&ParamVec> for &ParamVec {
    type Output = ParamVec;
    fn add(self, rhs: &ParamVec) -> ParamVec {
        ParamVec(&self.0 + &rhs.0)
    }
}

impl Sub<&ParamVec> for &ParamVec {
    type Output = ParamVec;
    fn sub(self, rhs: &ParamVec) -> ParamVec {
        ParamVec(&self.0 - &rhs.0)
    }
}

impl fmt::Display for ParamVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for ParamVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for v in self.0.iter() {
            seq.serialize_element(v)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ParamVec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct VecVisitor;
        impl<'de> Visitor<'de> for VecVisitor {
            type Value = Vec<f64>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-empty sequence of finite numbers")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Vec<f64>, A::Error> {
                let mut out = Vec::with_capacity(seq.size_hint().unwrap_or(1));
                while let Some(v) = seq.next_element::<f64>()? {
                    out.push(v);
                }
                Ok(out)
            }
        }
        let values = deserializer.deserialize_seq(VecVisitor)?;
        ParamVec::new(values).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(ParamVec::new(vec![]).is_err());
        assert!(ParamVec::new(vec![1.0, f64::NAN]).is_err());
        assert!(ParamVec::new(vec![f64::INFINITY]).is_err());
        assert!(ParamVec::new(vec![0.3]).is_ok());
    }

    #[test]
    fn arithmetic() {
        let a = ParamVec::new(vec![1.0, 2.0]).unwrap();
        let b = ParamVec::new(vec![0.5, -1.0]).unwrap();
        assert_eq!((&a + &b).as_slice(), &[1.5, 1.0]);
        assert_eq!((&a - &b).as_slice(), &[0.5, 3.0]);
    }
}
