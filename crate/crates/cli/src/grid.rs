//! Utilization grids: `start:stop:step` (both ends inclusive within 1e-9),
//! a comma-separated list, or a single value.

const TOL: f64 = 1e-9;

fn tidy(v: f64) -> f64 {
    (v * 1e9).round() / 1e9
}

fn number(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("bad grid value `{s}`: {e}"))
}

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = match parts[..] {
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if !(step > 0.0) || !step.is_finite() {
                return Err(format!("grid step must be positive, got {step}"));
            }
            if stop < start - TOL {
                return Err(format!("grid stop {stop} is below start {start}"));
            }
            let n = ((stop - start) / step + TOL).floor() as usize + 1;
            (0..n).map(|i| tidy(start + i as f64 * step)).collect()
        }
        [_] => spec.split(',').map(number).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("grid `{spec}` must be start:stop:step or a comma-separated list")),
    };
    if grid.is_empty() {
        return Err("grid is empty".into());
    }
    if grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err("grid values must be finite and > 0".into());
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err("grid values must be strictly increasing".into());
    }
    Ok(grid)
}
