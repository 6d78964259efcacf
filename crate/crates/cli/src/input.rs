//! Turning command-line values into a quiver, a dimension vector and a selection.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use nullcone::quiver::presets;
use nullcone::{DimVector, Quiver};

/// Built-in instances. `n` and `m` scale the dimension vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// A2 with dimension vector (n,n).
    A2,
    /// E6, α = (n, 2n+m, 2n+m, 2n+m, n, n+m), every simple.
    E6Scaled,
    /// E8, α = n·(2,4,7,4,3,2,1;3), every simple.
    E8All,
    /// E8, α = n·(2,4,7,4,3,2,1;3), simples 2 and 4.
    E8Pair,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Request {
    pub quiver: Quiver,
    pub alpha: Option<DimVector>,
    /// 0-based indices into the perpendicular simples; `None` selects all.
    pub simples: Option<Vec<usize>>,
}

impl Preset {
    pub fn request(self, n: i64, m: i64) -> Request {
        let e8 = |n: i64| [2, 4, 7, 4, 3, 2, 1, 3].iter().map(|v| v * n).collect::<Vec<_>>();
        match self {
            Preset::A2 => Request { quiver: presets::a(2), alpha: Some(vec![n, n]), simples: None },
            Preset::E6Scaled => Request {
                quiver: presets::e6(),
                alpha: Some(vec![n, 2 * n + m, 2 * n + m, 2 * n + m, n, n + m]),
                simples: None,
            },
            Preset::E8All => Request { quiver: presets::e8(), alpha: Some(e8(n)), simples: None },
            Preset::E8Pair => Request { quiver: presets::e8(), alpha: Some(e8(n)), simples: Some(vec![1, 3]) },
        }
    }
}

pub fn read_quiver(path: &Path) -> anyhow::Result<Quiver> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Quiver::parse(&text)?)
}

/// `"2,4,7"` or `"(2,4,7;3)"`; a `;` counts as a comma.
pub fn parse_vector(s: &str) -> anyhow::Result<DimVector> {
    let body = s.trim().trim_start_matches('(').trim_end_matches(')');
    let v: Vec<i64> = body
        .split([',', ';'])
        .map(|t| t.trim().parse::<i64>().map_err(|_| nullcone::Error::InvalidInput(format!("bad vector {s:?}"))))
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        bail!(nullcone::Error::InvalidInput("empty vector".into()));
    }
    Ok(v)
}

/// 1-based `"1,2"` to 0-based indices.
pub fn parse_simples(s: &str) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::new();
    for t in s.split(',') {
        let k: usize = t
            .trim()
            .parse()
            .ok()
            .filter(|&k| k >= 1)
            .ok_or_else(|| nullcone::Error::InvalidInput(format!("bad simple index {t:?}")))?;
        out.push(k - 1);
    }
    Ok(out)
}

/// Prints a vector of an E-type quiver with the branch leaf after a `;`.
pub fn fmt_vector(q: &Quiver, v: &[i64]) -> String {
    let items: Vec<String> = v.iter().map(i64::to_string).collect();
    let n = v.len();
    let last = n.checked_sub(1);
    let stacked = last.is_some_and(|l| {
        let nbrs: Vec<usize> = q.arcs().iter().filter_map(|&(t, h)| (t == l).then_some(h).or((h == l).then_some(t))).collect();
        nbrs.len() == 1 && q.arcs().iter().filter(|&&(t, h)| t == nbrs[0] || h == nbrs[0]).count() == 3
    });
    if stacked && n > 1 {
        format!("({};{})", items[..n - 1].join(","), items[n - 1])
    } else {
        format!("({})", items.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors() {
        assert_eq!(parse_vector("(2,4,7,4,3,2,1;3)").unwrap(), vec![2, 4, 7, 4, 3, 2, 1, 3]);
        assert!(parse_vector("1,x").is_err());
        assert_eq!(parse_simples("2,4").unwrap(), vec![1, 3]);
        assert!(parse_simples("0").is_err());
        assert_eq!(fmt_vector(&presets::e8(), &[2, 4, 7, 4, 3, 2, 1, 3]), "(2,4,7,4,3,2,1;3)");
        assert_eq!(fmt_vector(&presets::a(3), &[1, 1, 0]), "(1,1,0)");
    }
}
