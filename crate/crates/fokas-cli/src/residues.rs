//! Text form of pole data: one pole per line,
//! `re im column target coef_re coef_im theta|sextic|slice sign`.

use std::fmt::Write as _;
use std::path::Path;

use fokas_core::formats::read_file;
use fokas_core::spectral::{Pole, PoleExponent, ResidueData};
use fokas_core::{Error, Result, C64};

pub fn to_string(r: &ResidueData) -> String {
    let mut s = String::from("# residues\n");
    for p in &r.poles {
        let (kind, sign) = match p.exponent {
            PoleExponent::Theta(k) => ("theta", k),
            PoleExponent::Sextic(k) => ("sextic", k),
            PoleExponent::Slice(k) => ("slice", k),
        };
        let _ = writeln!(
            s,
            "{:.17e} {:.17e} {} {} {:.17e} {:.17e} {kind} {sign}",
            p.location.re, p.location.im, p.column, p.target, p.coefficient.re, p.coefficient.im
        );
    }
    s
}

pub fn parse(path: &str, text: &str) -> Result<ResidueData> {
    let mut poles = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| Error::Parse {
            path: path.to_string(),
            line: n + 1,
            msg: msg.to_string(),
        };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 8 {
            return Err(err("expected `re im column target coef_re coef_im kind sign`"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| err(&format!("not a number: `{s}`")));
        let idx = |s: &str| match s.parse::<usize>() {
            Ok(v @ 1..=2) => Ok(v),
            _ => Err(err(&format!("column index must be 1 or 2, got `{s}`"))),
        };
        let sign = match f[7] {
            "1" | "+1" => 1,
            "-1" => -1,
            s => return Err(err(&format!("sign must be 1 or -1, got `{s}`"))),
        };
        let exponent = match f[6] {
            "theta" => PoleExponent::Theta(sign),
            "sextic" => PoleExponent::Sextic(sign),
            "slice" => PoleExponent::Slice(sign),
            s => return Err(err(&format!("unknown exponent kind `{s}`"))),
        };
        poles.push(Pole {
            location: C64::new(num(f[0])?, num(f[1])?),
            column: idx(f[2])?,
            target: idx(f[3])?,
            coefficient: C64::new(num(f[4])?, num(f[5])?),
            exponent,
        });
    }
    Ok(ResidueData { poles })
}

pub fn read(path: &Path) -> Result<ResidueData> {
    parse(&path.display().to_string(), &read_file(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let r = ResidueData {
            poles: vec![
                Pole {
                    location: C64::new(0.3, 0.7),
                    column: 2,
                    target: 1,
                    coefficient: C64::new(-1.0 / 3.0, 2.5e-7),
                    exponent: PoleExponent::Theta(-1),
                },
                Pole {
                    location: C64::new(-0.1, -0.9),
                    column: 1,
                    target: 2,
                    coefficient: C64::new(4.0, 0.0),
                    exponent: PoleExponent::Slice(1),
                },
            ],
        };
        let back = parse("mem", &to_string(&r)).unwrap();
        assert_eq!(back.poles, r.poles);
    }

    #[test]
    fn rejects_bad_column() {
        let e = parse("mem", "0 1 3 1 1 0 theta 1\n").unwrap_err();
        assert!(e.to_string().contains("line 1"));
    }
}
