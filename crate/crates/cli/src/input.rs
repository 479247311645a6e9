//! Input specs.
//!
//! ```text
//! zero                 all cells 0
//! bits:0110            these bits, then 0s
//! fin:1,4,9            1 exactly at these cells
//! periodic:01/1        prefix "01", then "1" repeated (prefix may be empty)
//! gen:random           pseudo-random bits from --seed
//! gen:thue-morse       Thue-Morse sequence
//! rel:0,1,2;0-1,1-2    relation code: support ; pairs a-b
//! @path                read the spec from a file
//! ```

use std::fs;

use ittm_core::machine::GeneratedRule;
use ittm_core::stdlib::RelationCode;
use ittm_core::RealTape;

fn bit(c: char) -> Result<bool, String> {
    match c {
        '0' => Ok(false),
        '1' => Ok(true),
        _ => Err(format!("bad bit {c:?}")),
    }
}

fn bits(s: &str) -> Result<Vec<bool>, String> {
    s.chars().map(bit).collect()
}

fn numbers(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("bad cell index {t:?}")))
        .collect()
}

pub fn parse_input(spec: &str, seed: Option<u64>) -> Result<RealTape, String> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix('@') {
        let text =
            fs::read_to_string(path).map_err(|e| format!("cannot read input spec {path}: {e}"))?;
        return parse_input(&text, seed);
    }
    if spec == "zero" {
        return Ok(RealTape::zero());
    }
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| format!("unknown input spec {spec:?}"))?;
    match kind {
        "bits" => Ok(RealTape::from_bits(&bits(body)?)),
        "fin" => Ok(RealTape::fin_support(numbers(body)?)),
        "periodic" => {
            let (pre, per) = body
                .split_once('/')
                .ok_or("periodic spec needs PREFIX/PERIOD")?;
            RealTape::eventually_periodic(bits(pre)?, bits(per)?).map_err(|e| e.to_string())
        }
        "gen" => {
            let rule = match body {
                "random" => GeneratedRule::Random {
                    seed: seed.unwrap_or(0),
                },
                "thue-morse" => GeneratedRule::ThueMorse,
                other => return Err(format!("unknown generator {other:?}")),
            };
            let bound = rule.max_steps();
            RealTape::generated(rule, bound).map_err(|e| e.to_string())
        }
        "rel" => {
            let (support, pairs) = body.split_once(';').unwrap_or((body, ""));
            let pairs = pairs
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    let (a, b) = t.split_once('-').ok_or(format!("bad pair {t:?}"))?;
                    let a = a.parse().map_err(|_| format!("bad pair {t:?}"))?;
                    let b = b.parse().map_err(|_| format!("bad pair {t:?}"))?;
                    Ok((a, b))
                })
                .collect::<Result<Vec<_>, String>>()?;
            Ok(RelationCode::new(numbers(support)?, pairs).to_tape())
        }
        _ => Err(format!("unknown input spec {spec:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs() {
        assert_eq!(parse_input("zero", None).unwrap(), RealTape::zero());
        assert_eq!(
            parse_input("fin:1,4", None).unwrap(),
            RealTape::fin_support([1, 4])
        );
        let t = parse_input("bits:0110", None).unwrap();
        assert_eq!(t.prefix_bits(5), [false, true, true, false, false]);
        let t = parse_input("periodic:01/1", None).unwrap();
        assert_eq!(t.prefix_bits(4), [false, true, true, true]);
        let t = parse_input("rel:0,1;0-1", None).unwrap();
        assert_eq!(t, RelationCode::new([0, 1], [(0, 1)]).to_tape());
        assert_ne!(
            parse_input("gen:random", Some(1)).unwrap(),
            parse_input("gen:random", Some(2)).unwrap()
        );
        for bad in [
            "",
            "bits:012",
            "periodic:01",
            "periodic:0/",
            "gen:nope",
            "what:1",
            "fin:x",
        ] {
            assert!(parse_input(bad, None).is_err(), "{bad}");
        }
    }
}
