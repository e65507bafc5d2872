//! Line-oriented key files.
//!
//! ```text
//! paillier-public v1        paillier-private v1
//! n=<hex>                   n=<hex>
//! g=<hex>                   lambda=<hex>
//!                           mu=<hex>
//! ```
//!
//! Hex is lowercase without leading zeros. A trailing newline is written and
//! accepted.

use super::{PaillierError, PrivateKey, PublicKey};
use crate::bignat::BigNat;

const PUBLIC_HEADER: &str = "paillier-public v1";
const PRIVATE_HEADER: &str = "paillier-private v1";

fn fields(text: &str, header: &str, names: &[&str]) -> Result<Vec<BigNat>, PaillierError> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = body.split('\n');
    if lines.next() != Some(header) {
        return Err(PaillierError::KeyFormat(format!("expected header {header:?}")));
    }
    let mut values = Vec::with_capacity(names.len());
    for name in names {
        let line = lines
            .next()
            .ok_or_else(|| PaillierError::KeyFormat(format!("missing field {name}")))?;
        let hex = line
            .strip_prefix(name)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| PaillierError::KeyFormat(format!("expected {name}=<hex>, got {line:?}")))?;
        let value = BigNat::from_hex(hex)
            .ok_or_else(|| PaillierError::KeyFormat(format!("bad hex for {name}")))?;
        values.push(value);
    }
    if lines.next().is_some() {
        return Err(PaillierError::KeyFormat("trailing content".into()));
    }
    Ok(values)
}

impl PublicKey {
    pub fn to_text(&self) -> String {
        format!("{PUBLIC_HEADER}\nn={}\ng={}\n", self.n.to_hex(), self.g.to_hex())
    }
}

impl PrivateKey {
    pub fn to_text(&self) -> String {
        format!(
            "{PRIVATE_HEADER}\nn={}\nlambda={}\nmu={}\n",
            self.n.to_hex(),
            self.lambda.to_hex(),
            self.mu.to_hex()
        )
    }
}

pub fn parse_public_key(text: &str) -> Result<PublicKey, PaillierError> {
    let mut v = fields(text, PUBLIC_HEADER, &["n", "g"])?;
    let g = v.pop().unwrap();
    let n = v.pop().unwrap();
    PublicKey::new(n, g)
}

pub fn parse_private_key(text: &str) -> Result<PrivateKey, PaillierError> {
    let mut v = fields(text, PRIVATE_HEADER, &["n", "lambda", "mu"])?;
    let mu = v.pop().unwrap();
    let lambda = v.pop().unwrap();
    let n = v.pop().unwrap();
    PrivateKey::new(n, lambda, mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paillier::keypair_from_primes;

    #[test]
    fn toy_key_text() {
        let (pk, sk) =
            keypair_from_primes(&BigNat::from_u64(5), &BigNat::from_u64(7), None).unwrap();
        assert_eq!(pk.to_text(), "paillier-public v1\nn=23\ng=24\n");
        assert_eq!(sk.to_text(), "paillier-private v1\nn=23\nlambda=c\nmu=3\n");
        assert_eq!(parse_public_key(&pk.to_text()).unwrap(), pk);
        assert_eq!(parse_private_key(&sk.to_text()).unwrap(), sk);
    }

    #[test]
    fn rejects_malformed_files() {
        let bad = [
            "paillier-public v2\nn=23\ng=24\n",
            "paillier-public v1\nn=23\n",
            "paillier-public v1\nn=23\ng=024\n",
            "paillier-public v1\nn=23\ng=2A\n",
            "paillier-public v1\ng=24\nn=23\n",
            "paillier-public v1\nn=23\ng=24\nextra\n",
            "paillier-private v1\nn=23\ng=24\n",
        ];
        for text in bad {
            assert!(
                matches!(parse_public_key(text), Err(PaillierError::KeyFormat(_))),
                "{text:?}"
            );
        }
        assert!(matches!(
            parse_private_key("paillier-public v1\nn=23\ng=24\n"),
            Err(PaillierError::KeyFormat(_))
        ));
    }

    #[test]
    fn rejects_invalid_values() {
        // Even modulus.
        assert!(matches!(
            parse_public_key("paillier-public v1\nn=22\ng=23\n"),
            Err(PaillierError::InvalidKey(_))
        ));
        // mu >= n
        assert!(matches!(
            parse_private_key("paillier-private v1\nn=23\nlambda=c\nmu=23\n"),
            Err(PaillierError::InvalidKey(_))
        ));
    }
}
