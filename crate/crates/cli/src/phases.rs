use std::f64::consts::PI;

/// Evenly spaced phases, both endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl PhaseGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = self.count - 1;
        (0..self.count)
            .map(|i| {
                if i == last {
                    self.end
                } else {
                    self.start + (self.end - self.start) * i as f64 / last as f64
                }
            })
            .collect()
    }
}

/// `1.5`, `pi`, `-pi`, `0.5pi`, `2*pi`.
fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let bad = || format!("`{s}` is not an angle (try `1.5`, `pi` or `0.5pi`)");
    let Some(head) = s.strip_suffix("pi") else {
        return s.parse::<f64>().map_err(|_| bad());
    };
    let head = head.strip_suffix('*').unwrap_or(head);
    let factor = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(factor * PI)
}

pub fn parse_grid(s: &str) -> Result<PhaseGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, end, count] = parts[..] else {
        return Err("expected start:end:count".into());
    };
    let grid = PhaseGrid {
        start: parse_angle(start)?,
        end: parse_angle(end)?,
        count: count
            .trim()
            .parse()
            .map_err(|_| format!("`{count}` is not a positive count"))?,
    };
    if grid.count == 0 {
        return Err("count must be at least 1".into());
    }
    if !(grid.start.is_finite() && grid.end.is_finite()) {
        return Err("phase endpoints must be finite".into());
    }
    if grid.count > 1 && grid.end <= grid.start {
        return Err("end must be greater than start".into());
    }
    Ok(grid)
}
