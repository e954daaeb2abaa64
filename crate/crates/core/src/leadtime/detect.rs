use std::io::Write;

use serde::{Deserialize, Serialize};

use super::source::AdoptionTimes;
use crate::error::{Error, Result};
use crate::sampling::NodeSample;
use crate::stats;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignificanceTest {
    /// Pooled two-proportion z-test on cumulative incidence.
    #[default]
    TwoProportion,
    /// Welch t-test on the adoption times seen so far.
    Welch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    pub alpha: f64,
    pub consecutive_required: usize,
    /// Bucket width in time units.
    pub bucket: f64,
    /// Half-open observation horizon `[start, end)`.
    pub start: f64,
    pub end: f64,
    #[serde(default)]
    pub test: SignificanceTest,
}

impl DetectionConfig {
    pub fn new(start: f64, end: f64) -> Self {
        DetectionConfig {
            alpha: 0.05,
            consecutive_required: 2,
            bucket: 1.0,
            start,
            end,
            test: SignificanceTest::TwoProportion,
        }
    }

    fn validate(&self) -> Result<usize> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.consecutive_required < 1 {
            return Err(Error::InvalidParameter(
                "consecutive_required must be at least 1".into(),
            ));
        }
        if self.bucket.is_nan()
            || self.bucket <= 0.0
            || !self.start.is_finite()
            || !self.end.is_finite()
        {
            return Err(Error::InvalidParameter("invalid detection horizon".into()));
        }
        if self.end - self.start < self.bucket {
            return Err(Error::WindowTooShort);
        }
        Ok(((self.end - self.start) / self.bucket).ceil() as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DayRow {
    pub day: usize,
    pub sensor_cum: f64,
    pub control_cum: f64,
    pub sensor_daily: f64,
    pub control_daily: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub config: DetectionConfig,
    pub sensor_size: usize,
    pub control_size: usize,
    pub days: Vec<DayRow>,
    pub detection_day: Option<usize>,
    pub peak_incidence_day: Option<usize>,
    pub control_catch_up_day: Option<usize>,
}

impl DetectionReport {
    /// Days between detection and the control group's catch-up.
    pub fn lead_days(&self) -> Option<usize> {
        Some(self.control_catch_up_day? - self.detection_day?)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "day,sensor_cum,control_cum,sensor_daily,control_daily,p_value"
        )?;
        for r in &self.days {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.day, r.sensor_cum, r.control_cum, r.sensor_daily, r.control_daily, r.p_value
            )?;
        }
        Ok(())
    }
}

struct Group {
    daily: Vec<usize>,
    /// Adoption times grouped by bucket.
    times: Vec<Vec<f64>>,
    size: usize,
}

fn bucketize(
    times: &AdoptionTimes,
    sample: &NodeSample,
    cfg: &DetectionConfig,
    days: usize,
) -> Group {
    let mut g = Group {
        daily: vec![0; days],
        times: vec![Vec::new(); days],
        size: sample.len(),
    };
    for &v in &sample.members {
        if let Some(t) = times.get(v) {
            if t >= cfg.start && t < cfg.end {
                let d = (((t - cfg.start) / cfg.bucket).floor() as usize).min(days - 1);
                g.daily[d] += 1;
                g.times[d].push(t);
            }
        }
    }
    g
}

/// Day-by-day comparison of sensor and control incidence. The p-value of a
/// day uses only adoptions up to the end of that day.
pub fn realtime_detect(
    times: &AdoptionTimes,
    sensor: &NodeSample,
    control: &NodeSample,
    config: &DetectionConfig,
) -> Result<DetectionReport> {
    if sensor.is_empty() || control.is_empty() {
        return Err(Error::InvalidParameter(
            "detection needs non-empty samples".into(),
        ));
    }
    let days = config.validate()?;
    let s = bucketize(times, sensor, config, days);
    let c = bucketize(times, control, config, days);

    let (mut s_cum, mut c_cum) = (0usize, 0usize);
    let (mut s_seen, mut c_seen) = (Vec::new(), Vec::new());
    let mut rows = Vec::with_capacity(days);
    for d in 0..days {
        s_cum += s.daily[d];
        c_cum += c.daily[d];
        let p_value = match config.test {
            SignificanceTest::TwoProportion => {
                stats::two_proportion_p_value(s_cum, s.size, c_cum, c.size)
            }
            SignificanceTest::Welch => {
                s_seen.extend_from_slice(&s.times[d]);
                c_seen.extend_from_slice(&c.times[d]);
                stats::welch_p_value(&s_seen, &c_seen)
            }
        };
        rows.push(DayRow {
            day: d,
            sensor_cum: s_cum as f64 / s.size as f64,
            control_cum: c_cum as f64 / c.size as f64,
            sensor_daily: s.daily[d] as f64 / s.size as f64,
            control_daily: c.daily[d] as f64 / c.size as f64,
            p_value,
        });
    }

    let mut run = 0;
    let mut detection_day = None;
    for r in &rows {
        if r.p_value < config.alpha && r.sensor_cum > r.control_cum {
            run += 1;
            if run == config.consecutive_required {
                detection_day = Some(r.day + 1 - run);
                break;
            }
        } else {
            run = 0;
        }
    }

    let mut peak_incidence_day = None;
    let mut best = 0;
    for d in 0..days {
        let combined = s.daily[d] + c.daily[d];
        if combined > best {
            best = combined;
            peak_incidence_day = Some(d);
        }
    }

    let control_catch_up_day = detection_day.and_then(|det| {
        let target = rows[det].sensor_cum;
        rows[det..]
            .iter()
            .find(|r| r.control_cum >= target)
            .map(|r| r.day)
    });

    Ok(DetectionReport {
        config: *config,
        sensor_size: s.size,
        control_size: c.size,
        days: rows,
        detection_day,
        peak_incidence_day,
        control_catch_up_day,
    })
}
