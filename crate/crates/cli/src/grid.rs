use funvol::Error;

/// `a:b:count[:log]`, inclusive of both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub log: bool,
}

impl Grid {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let bad = || Error::Schema(format!("grid must be `a:b:count[:log]`, got {text:?}"));
        let parts: Vec<&str> = text.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let log = match parts.get(3).map(|s| s.trim()) {
            None | Some("lin") => false,
            Some("log") => true,
            Some(_) => return Err(bad()),
        };
        if !(lo.is_finite() && hi.is_finite()) || count == 0 || hi < lo || (count > 1 && hi == lo) || (log && lo <= 0.0) {
            return Err(bad());
        }
        Ok(Self { lo, hi, count, log })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let m = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / m;
                if self.log {
                    (self.lo.ln() + t * (self.hi / self.lo).ln()).exp()
                } else {
                    self.lo + t * (self.hi - self.lo)
                }
            })
            .map(|x| x.clamp(self.lo, self.hi))
            .collect()
    }
}

/// Row-major tensor product, last axis fastest.
pub fn tensor(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|p| {
                axis.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect()
    })
}
