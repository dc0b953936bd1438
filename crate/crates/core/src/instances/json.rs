use serde::{Deserialize, Serialize};

use super::program::{LpInstance, QpInstance, SdpInstance};
use crate::error::Result;

/// JSON document for an instance: `{family, m, d, seed, A, b, c|C, q?, certificate}`.
///
/// Floats are written in shortest round-trip form, so reading a document
/// back reproduces every stored value bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Instance {
    Lp(LpInstance),
    Qp(QpInstance),
    Sdp(SdpInstance),
}

impl Instance {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Dense matrices as a list of rows.
pub(crate) mod rows {
    use nalgebra::DMatrix;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{random_lp, random_qp, random_sdp};
    use proptest::prelude::*;

    fn bits(v: &serde_json::Value, out: &mut Vec<u64>) {
        match v {
            serde_json::Value::Number(n) => out.push(n.as_f64().unwrap().to_bits()),
            serde_json::Value::Array(a) => a.iter().for_each(|x| bits(x, out)),
            serde_json::Value::Object(o) => o.values().for_each(|x| bits(x, out)),
            _ => {}
        }
    }

    #[test]
    fn documents_have_contract_keys() {
        let lp = Instance::Lp(random_lp(4, 2, 1).unwrap());
        let v: serde_json::Value = serde_json::from_str(&lp.to_json().unwrap()).unwrap();
        for k in ["family", "m", "d", "seed", "A", "b", "c", "certificate"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["family"], "lp");

        let qp = Instance::Qp(random_qp(4, 2, 1).unwrap());
        let v: serde_json::Value = serde_json::from_str(&qp.to_json().unwrap()).unwrap();
        assert_eq!(v["family"], "qp");
        assert!(v.get("q").is_some());

        let sdp = Instance::Sdp(random_sdp(3, 2, 1).unwrap());
        let v: serde_json::Value = serde_json::from_str(&sdp.to_json().unwrap()).unwrap();
        assert_eq!(v["family"], "sdp");
        assert!(v.get("C").is_some());
        assert_eq!(v["A"].as_array().unwrap().len(), 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn json_round_trip_is_bit_exact(seed in 0u64..10_000, m in 3usize..7, which in 0u8..3) {
            let inst = match which {
                0 => Instance::Lp(random_lp(m, m / 2, seed).unwrap()),
                1 => Instance::Qp(random_qp(m, m / 2, seed).unwrap()),
                _ => Instance::Sdp(random_sdp(m.min(4), 2, seed).unwrap()),
            };
            let text = inst.to_json().unwrap();
            let back = Instance::from_json(&text).unwrap();
            prop_assert_eq!(&back, &inst);
            let mut a = Vec::new();
            let mut b = Vec::new();
            bits(&serde_json::to_value(&inst).unwrap(), &mut a);
            bits(&serde_json::to_value(&back).unwrap(), &mut b);
            prop_assert_eq!(a, b);
            prop_assert_eq!(back.to_json().unwrap(), text);
        }
    }
}
