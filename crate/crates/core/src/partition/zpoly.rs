//! Plain-text exchange format for polynomials.
//!
//! ```text
//! zpoly <model> <bc> <Lv> <Lh>
//! <coefficient of z^0>
//! <coefficient of z^1>
//! ...
//! ```

use num_bigint::BigInt;

use super::BoundaryCondition;
use crate::error::{Error, Result};
use crate::poly::ZPolynomial;
use crate::transfer::Model;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZPolyRecord {
    pub model: Model,
    pub bc: BoundaryCondition,
    pub lv: usize,
    pub lh: usize,
    pub poly: ZPolynomial,
}

impl ZPolyRecord {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "zpoly {} {} {} {}\n",
            self.model.name(),
            self.bc,
            self.lv,
            self.lh
        );
        if self.poly.is_zero() {
            s.push_str("0\n");
        }
        for c in self.poly.coeffs() {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidArgument(format!("malformed zpoly: {m}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty input"))?;
        let parts: Vec<&str> = header.split(' ').collect();
        if parts.len() != 5 || parts[0] != "zpoly" {
            return Err(bad("bad header"));
        }
        let model: Model = parts[1].parse()?;
        let bc: BoundaryCondition = parts[2].parse()?;
        let lv = parts[3].parse().map_err(|_| bad("bad Lv"))?;
        let lh = parts[4].parse().map_err(|_| bad("bad Lh"))?;
        let coeffs = lines
            .map(|l| l.parse::<BigInt>().map_err(|_| bad("bad coefficient")))
            .collect::<Result<Vec<_>>>()?;
        Ok(ZPolyRecord {
            model,
            bc,
            lv,
            lh,
            poly: ZPolynomial::new(coeffs),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let r = ZPolyRecord {
            model: Model::HardSquare,
            bc: BoundaryCondition::FF,
            lv: 2,
            lh: 2,
            poly: ZPolynomial::from_i64(&[1, 4, 2]),
        };
        let text = r.to_text();
        assert_eq!(text, "zpoly squares ff 2 2\n1\n4\n2\n");
        assert_eq!(ZPolyRecord::parse(&text).unwrap(), r);
        assert!(ZPolyRecord::parse("zpoly squares ff 2\n1\n").is_err());
        assert!(ZPolyRecord::parse("zpoly squares ff 2 2\n 1\n").is_err());
    }
}
