//! Deterministic rasters of analytic test shapes.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::ShapeGrid;
use crate::error::{Error, Result};

/// Named body parts of the humanoid presets, used to label pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Limb {
    Torso,
    Head,
    LeftArm,
    RightArm,
    LeftLeg,
    RightLeg,
    Occluder,
    Sliver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HumanoidPreset {
    /// Torso, head, two arms and two legs, mirror-symmetric.
    Standard,
    /// The standard figure with a rectangular block attached to the left leg.
    Occluded,
    /// The standard figure with a thin sliver on the right foot.
    Sliver,
}

/// Analytic shapes accepted as `name:args` strings, e.g. `annulus:8,16`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticShape {
    Disc {
        r: usize,
    },
    Annulus {
        r_in: usize,
        r_out: usize,
    },
    Dumbbell {
        r1: usize,
        r2: usize,
        neck_w: usize,
        neck_len: usize,
    },
    /// A one-dimensional interval of `n` pixels.
    Strip {
        n: usize,
    },
    Humanoid(HumanoidPreset),
}

impl SyntheticShape {
    pub fn rasterize(&self) -> Result<ShapeGrid> {
        match *self {
            SyntheticShape::Strip { n } => {
                if n == 0 {
                    return Err(Error::InvalidDimensions("strip length must be positive".into()));
                }
                ShapeGrid::from_line(&vec![true; n])
            }
            SyntheticShape::Humanoid(preset) => {
                let canvas = humanoid_canvas(preset);
                ShapeGrid::from_mask(canvas.width, canvas.height, &canvas.mask())
            }
            _ => {
                let canvas = self.canvas()?;
                ShapeGrid::from_mask(canvas.width, canvas.height, &canvas.mask())
            }
        }
    }

    fn canvas(&self) -> Result<Canvas> {
        match *self {
            SyntheticShape::Disc { r } => {
                positive(&[r])?;
                let mut c = Canvas::new(2 * r + 1, 2 * r + 1);
                c.disc(r as f64, r as f64, r as f64, Limb::Torso);
                Ok(c)
            }
            SyntheticShape::Annulus { r_in, r_out } => {
                positive(&[r_in, r_out])?;
                if r_in >= r_out {
                    return Err(Error::InvalidDimensions(format!("annulus needs r_in < r_out, got {r_in} >= {r_out}")));
                }
                let mut c = Canvas::new(2 * r_out + 1, 2 * r_out + 1);
                let centre = r_out as f64;
                c.disc(centre, centre, r_out as f64, Limb::Torso);
                c.erase_disc(centre, centre, r_in as f64);
                Ok(c)
            }
            SyntheticShape::Dumbbell { r1, r2, neck_w, neck_len } => {
                positive(&[r1, r2, neck_w, neck_len])?;
                let rmax = r1.max(r2);
                let cx1 = r1;
                let cx2 = cx1 + r1 + neck_len + r2;
                let mut c = Canvas::new(cx2 + r2 + 1, 2 * rmax + 1);
                let cy = rmax as f64;
                c.disc(cx1 as f64, cy, r1 as f64, Limb::Torso);
                c.disc(cx2 as f64, cy, r2 as f64, Limb::Torso);
                // rows with 2|y - cy| < neck_w; even widths round down to odd
                let half = (neck_w as f64) / 2.0;
                for y in 0..c.height {
                    if 2.0 * (y as f64 - cy).abs() < 2.0 * half {
                        for x in cx1..=cx2 {
                            c.set(x, y, Limb::Torso);
                        }
                    }
                }
                Ok(c)
            }
            SyntheticShape::Strip { .. } | SyntheticShape::Humanoid(_) => {
                unreachable!("handled in rasterize")
            }
        }
    }
}

fn positive(values: &[usize]) -> Result<()> {
    if values.contains(&0) {
        return Err(Error::InvalidDimensions("shape dimensions must be positive".into()));
    }
    Ok(())
}

impl fmt::Display for SyntheticShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntheticShape::Disc { r } => write!(f, "disc:{r}"),
            SyntheticShape::Annulus { r_in, r_out } => write!(f, "annulus:{r_in},{r_out}"),
            SyntheticShape::Dumbbell { r1, r2, neck_w, neck_len } => {
                write!(f, "dumbbell:{r1},{r2},{neck_w},{neck_len}")
            }
            SyntheticShape::Strip { n } => write!(f, "strip:{n}"),
            SyntheticShape::Humanoid(p) => {
                let name = match p {
                    HumanoidPreset::Standard => "standard",
                    HumanoidPreset::Occluded => "occluded",
                    HumanoidPreset::Sliver => "sliver",
                };
                write!(f, "humanoid:{name}")
            }
        }
    }
}

impl FromStr for SyntheticShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let bad = || Error::InvalidParameter(format!("unrecognized synthetic shape `{s}`"));
        if name == "humanoid" {
            let preset = match args {
                "" | "standard" => HumanoidPreset::Standard,
                "occluded" => HumanoidPreset::Occluded,
                "sliver" => HumanoidPreset::Sliver,
                _ => return Err(bad()),
            };
            return Ok(SyntheticShape::Humanoid(preset));
        }
        let nums: Vec<usize> = args
            .split(',')
            .map(|a| a.trim().parse::<usize>())
            .collect::<core::result::Result<_, _>>()
            .map_err(|_| bad())?;
        match (name, nums.as_slice()) {
            ("disc", &[r]) => Ok(SyntheticShape::Disc { r }),
            ("annulus", &[r_in, r_out]) => Ok(SyntheticShape::Annulus { r_in, r_out }),
            ("dumbbell", &[r1, r2, neck_w, neck_len]) => Ok(SyntheticShape::Dumbbell { r1, r2, neck_w, neck_len }),
            ("strip", &[n]) => Ok(SyntheticShape::Strip { n }),
            _ => Err(bad()),
        }
    }
}

/// Labeled paint surface; `None` is background.
#[derive(Debug, Clone)]
struct Canvas {
    width: usize,
    height: usize,
    labels: Vec<Option<Limb>>,
}

impl Canvas {
    fn new(width: usize, height: usize) -> Self {
        Canvas { width, height, labels: vec![None; width * height] }
    }

    fn set(&mut self, x: usize, y: usize, limb: Limb) {
        self.labels[y * self.width + x] = Some(limb);
    }

    fn mask(&self) -> Vec<bool> {
        self.labels.iter().map(Option::is_some).collect()
    }

    fn paint(&mut self, limb: Limb, inside: impl Fn(f64, f64) -> bool) {
        for y in 0..self.height {
            for x in 0..self.width {
                if inside(x as f64, y as f64) {
                    self.set(x, y, limb);
                }
            }
        }
    }

    fn disc(&mut self, cx: f64, cy: f64, r: f64, limb: Limb) {
        self.paint(limb, |x, y| (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r);
    }

    fn erase_disc(&mut self, cx: f64, cy: f64, r: f64) {
        for y in 0..self.height {
            for x in 0..self.width {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                if dx * dx + dy * dy <= r * r {
                    self.labels[y * self.width + x] = None;
                }
            }
        }
    }

    fn ellipse(&mut self, cx: f64, cy: f64, rx: f64, ry: f64, limb: Limb) {
        self.paint(limb, |x, y| {
            let (u, v) = ((x - cx) / rx, (y - cy) / ry);
            u * u + v * v <= 1.0
        });
    }

    fn rect(&mut self, x0: usize, y0: usize, x1: usize, y1: usize, limb: Limb) {
        for y in y0..y1 {
            for x in x0..x1 {
                self.set(x, y, limb);
            }
        }
    }

    /// Pixels within distance `ra + t (rb − ra)` of the point at parameter `t`
    /// along the segment a–b.
    fn tapered(&mut self, (ax, ay): (f64, f64), (bx, by): (f64, f64), ra: f64, rb: f64, limb: Limb) {
        let (dx, dy) = (bx - ax, by - ay);
        let len2 = dx * dx + dy * dy;
        self.paint(limb, |x, y| {
            let t = (((x - ax) * dx + (y - ay) * dy) / len2).clamp(0.0, 1.0);
            let (px, py) = (ax + t * dx - x, ay + t * dy - y);
            let r = ra + t * (rb - ra);
            px * px + py * py <= r * r
        });
    }
}

fn humanoid_canvas(preset: HumanoidPreset) -> Canvas {
    let mut c = Canvas::new(HUMANOID_WIDTH, HUMANOID_HEIGHT);
    let mid = (HUMANOID_WIDTH / 2) as f64;
    c.ellipse(mid, 144.0, 24.0, 56.0, Limb::Torso);
    c.disc(mid, 66.0, 16.0, Limb::Head);
    c.rect(93, 66, 107, 100, Limb::Head);
    // Limb lengths differ so that every limb has its own area.
    c.tapered((mid - 12.0, 110.0), (mid - 60.0, 196.0), 6.0, 10.0, Limb::LeftArm);
    c.tapered((mid + 12.0, 110.0), (mid + 56.0, 186.0), 6.0, 10.0, Limb::RightArm);
    c.tapered((mid - 12.0, 184.0), (mid - 20.0, 310.0), 10.0, 7.0, Limb::LeftLeg);
    c.tapered((mid + 12.0, 184.0), (mid + 18.0, 270.0), 10.0, 7.0, Limb::RightLeg);
    match preset {
        HumanoidPreset::Standard => {}
        HumanoidPreset::Occluded => c.rect(50, 312, 76, 332, Limb::Occluder),
        HumanoidPreset::Sliver => {
            c.rect(124, 269, 136, 271, Limb::Sliver);
            c.disc(138.0, 270.0, 3.0, Limb::Sliver);
        }
    }
    c
}

const HUMANOID_WIDTH: usize = 200;
const HUMANOID_HEIGHT: usize = 336;

/// Per-pixel part labels of a humanoid preset on its padded grid, or `None`
/// for background. Used to interpret decompositions in tests and reports.
fn humanoid_labels(preset: HumanoidPreset) -> (usize, usize, Vec<Option<Limb>>) {
    let c = humanoid_canvas(preset);
    let (pw, ph) = (c.width + 2, c.height + 2);
    let mut out = vec![None; pw * ph];
    for y in 0..c.height {
        for x in 0..c.width {
            out[(y + 1) * pw + x + 1] = c.labels[y * c.width + x];
        }
    }
    (pw, ph, out)
}

impl HumanoidPreset {
    pub fn labels(self) -> (usize, usize, Vec<Option<Limb>>) {
        humanoid_labels(self)
    }

    pub fn name(self) -> String {
        format!("{}", SyntheticShape::Humanoid(self))
    }
}
