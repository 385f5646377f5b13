//! The a_n table: multiplicative extension of the prime coefficients, plus
//! the on-disk a_p cache.
//!
//! Cache format (one file per curve label): a header line
//! `# curve=<label> model=<hash> pmax=<P>` followed by `p<TAB>a_p` records in
//! increasing p.  Rewriting is always allowed; payloads are content-identical
//! for a given model, so last-writer-wins is safe.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use sha2::{Digest, Sha256};

use crate::curve::WeierstrassModel;

use super::count::{ap_bad, ap_good, prime_power_split};
use super::{LocalData, LocalError};
use crate::arith::smallest_prime_factor;

/// Dirichlet coefficients a_1..a_{n_max}.
#[derive(Debug, Clone)]
pub struct ApTable {
    pub n_max: usize,
    a: Vec<i64>,
}

impl ApTable {
    pub fn a(&self, n: usize) -> i64 {
        self.a[n]
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.a[..]
    }
}

/// Short content hash of a model, for cache validation.
pub fn model_hash(model: &WeierstrassModel) -> String {
    let mut h = Sha256::new();
    h.update(
        format!(
            "{},{},{},{},{}",
            model.a1, model.a2, model.a3, model.a4, model.a6
        )
        .as_bytes(),
    );
    let digest = h.finalize();
    digest[..8].iter().map(|b| format!("{:02x}", b)).collect()
}

/// Builds a_1..a_{n_max} from point counts at good primes, the reduction type
/// at bad primes, the Hecke recursion at prime powers, and multiplicativity.
///
/// `precomputed` supplies known (p, a_p) pairs (for example from the cache);
/// missing primes are counted on the spot.
pub fn an_table(
    model: &WeierstrassModel,
    locals: &[LocalData],
    n_max: usize,
    precomputed: &BTreeMap<u64, i64>,
) -> Result<ApTable, LocalError> {
    let spf = smallest_prime_factor(n_max + 1);
    let mut a = vec![0i64; n_max + 1];
    if n_max >= 1 {
        a[1] = 1;
    }
    let bad: BTreeMap<u64, &LocalData> = locals
        .iter()
        .filter(|l| l.f_p > 0)
        .filter_map(|l| num_traits::ToPrimitive::to_u64(&l.p).map(|p| (p, l)))
        .collect();
    for n in 2..=n_max {
        let p = spf[n] as u64;
        let (v, rest) = prime_power_split(n as u64, p);
        let pk = (n as u64 / rest) as usize;
        if rest != 1 {
            // coprime split
            a[n] = a[pk] * a[rest as usize];
            continue;
        }
        // n = p^v
        if v == 1 {
            a[n] = if let Some(l) = bad.get(&p) {
                ap_bad(l)
            } else if let Some(known) = precomputed.get(&p) {
                *known
            } else {
                ap_good(model, &BigInt::from(p))?
            };
        } else if bad.contains_key(&p) {
            // additive: 0, multiplicative: (±1)^v — both equal a_p^v
            a[n] = a[p as usize].pow(v);
        } else {
            // Hecke: a_{p^v} = a_p · a_{p^{v-1}} - p · a_{p^{v-2}}
            let pv1 = (p as usize).pow(v - 1);
            let pv2 = (p as usize).pow(v - 2);
            a[n] = a[p as usize] * a[pv1] - (p as i64) * a[pv2];
        }
    }
    Ok(ApTable { n_max, a })
}

/// Reads cached a_p pairs; returns None on any mismatch (missing file, model
/// hash change, malformed content is an error).
pub fn ap_cache_read(
    dir: &Path,
    label: &str,
    model: &WeierstrassModel,
) -> Result<Option<(u64, BTreeMap<u64, i64>)>, LocalError> {
    let path = dir.join(format!("{}.ap", sanitize(label)));
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(_) => return Ok(None),
    };
    let mut lines = text.lines();
    let header = match lines.next() {
        Some(h) => h,
        None => return Ok(None),
    };
    let expect = format!("# curve={} model={}", label, model_hash(model));
    if !header.starts_with(&expect) {
        return Ok(None);
    }
    let pmax: u64 = header
        .rsplit_once("pmax=")
        .and_then(|(_, v)| v.trim().parse().ok())
        .ok_or_else(|| LocalError::MalformedCache("missing pmax".into()))?;
    let mut out = BTreeMap::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (ps, aps) = line
            .split_once('\t')
            .ok_or_else(|| LocalError::MalformedCache(format!("bad record: {:?}", line)))?;
        let p: u64 = ps
            .parse()
            .map_err(|_| LocalError::MalformedCache(format!("bad prime: {:?}", ps)))?;
        let ap: i64 = aps
            .parse()
            .map_err(|_| LocalError::MalformedCache(format!("bad a_p: {:?}", aps)))?;
        out.insert(p, ap);
    }
    Ok(Some((pmax, out)))
}

/// Writes the a_p cache file for a curve (atomic last-writer-wins).
pub fn ap_cache_write(
    dir: &Path,
    label: &str,
    model: &WeierstrassModel,
    pmax: u64,
    pairs: &BTreeMap<u64, i64>,
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.ap", sanitize(label)));
    let tmp = dir.join(format!(".{}.ap.tmp-{}", sanitize(label), std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        writeln!(f, "# curve={} model={} pmax={}", label, model_hash(model), pmax)?;
        for (p, ap) in pairs {
            writeln!(f, "{}\t{}", p, ap)?;
        }
    }
    std::fs::rename(&tmp, &path)
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::conductor;
    use num_integer::Integer;

    fn table_for(a: [i64; 5], n_max: usize) -> ApTable {
        let m = WeierstrassModel::from_i64(a).unwrap();
        let (_, locals) = conductor(&m);
        an_table(&m, &locals, n_max, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn basic_values_37a1() {
        let t = table_for([0, 0, 1, -1, 0], 40);
        assert_eq!(t.a(1), 1);
        assert_eq!(t.a(2), -2);
        assert_eq!(t.a(3), -3);
        // a_4 = a_2² - 2 (Hecke at p = 2, k = 1)
        assert_eq!(t.a(4), t.a(2) * t.a(2) - 2);
        // a_6 = a_2·a_3
        assert_eq!(t.a(6), t.a(2) * t.a(3));
        // I1 at 37 is split multiplicative for 37a1? sign from reduction,
        // either way |a_37| = 1.
        assert_eq!(t.a(37).abs(), 1);
    }

    #[test]
    fn multiplicativity_exhaustive_desk_scale() {
        let t = table_for([0, -1, 1, -10, -20], 10_000);
        for m in 2..100usize {
            for n in 2..=(10_000 / m) {
                if m.gcd(&n) == 1 {
                    assert_eq!(t.a(m * n), t.a(m) * t.a(n), "m={} n={}", m, n);
                }
            }
        }
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("apcache-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let model = WeierstrassModel::from_i64([0, 0, 1, -1, 0]).unwrap();
        let mut pairs = BTreeMap::new();
        pairs.insert(2u64, -2i64);
        pairs.insert(3, -3);
        pairs.insert(5, -2);
        ap_cache_write(&dir, "37a1", &model, 5, &pairs).unwrap();
        let (pmax, back) = ap_cache_read(&dir, "37a1", &model).unwrap().unwrap();
        assert_eq!(pmax, 5);
        assert_eq!(back, pairs);
        // A different model invalidates the cache.
        let other = WeierstrassModel::from_i64([0, -1, 1, -10, -20]).unwrap();
        assert!(ap_cache_read(&dir, "37a1", &other).unwrap().is_none());
        let _ = std::fs::remove_dir_all(&dir);
    }
}
