//! Mereogeometry of axis-parallel rectangles and formation navigation.
//!
//! Rectangles are closed; two rectangles *overlap* only when their
//! intersection has positive area, so touching edges is allowed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

const EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate rectangle ({x1}, {y1}, {x2}, {y2})")]
    InvalidRect { x1: f64, y1: f64, x2: f64, y2: f64 },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: unknown robot {id}")]
    UnknownRobot { line: usize, column: usize, id: u32 },
    #[error("world line {line}: {message}")]
    World { line: usize, message: String },
    #[error("no pose for robot {0}")]
    MissingPose(u32),
    #[error("formation has no robots")]
    NoRobots,
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl Rect {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Rect> {
        if [x1, y1, x2, y2].iter().all(|v| v.is_finite()) && x1 < x2 && y1 < y2 {
            Ok(Rect { x1, y1, x2, y2 })
        } else {
            Err(GeometryError::InvalidRect { x1, y1, x2, y2 })
        }
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn centroid(&self) -> (f64, f64) {
        ((self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0)
    }

    pub fn intersection_area(&self, o: &Rect) -> f64 {
        let w = self.x2.min(o.x2) - self.x1.max(o.x1);
        let h = self.y2.min(o.y2) - self.y1.max(o.y1);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }

    /// Positive-area intersection.
    pub fn overlaps(&self, o: &Rect) -> bool {
        self.x2.min(o.x2) - self.x1.max(o.x1) > EPS && self.y2.min(o.y2) - self.y1.max(o.y1) > EPS
    }

    /// `o ⊆ self`, up to rounding.
    pub fn contains(&self, o: &Rect) -> bool {
        o.x1 >= self.x1 - EPS && o.y1 >= self.y1 - EPS && o.x2 <= self.x2 + EPS && o.y2 <= self.y2 + EPS
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Rect {
        Rect {
            x1: self.x1 + dx,
            y1: self.y1 + dy,
            x2: self.x2 + dx,
            y2: self.y2 + dy,
        }
    }

    pub fn centered(cx: f64, cy: f64, hx: f64, hy: f64) -> Rect {
        Rect {
            x1: cx - hx,
            y1: cy - hy,
            x2: cx + hx,
            y2: cy + hy,
        }
    }
}

/// `area(a ∩ b) / area(a)`.
pub fn area_inclusion(a: &Rect, b: &Rect) -> f64 {
    if b.contains(a) && a.contains(b) {
        return 1.0;
    }
    (a.intersection_area(b) / a.area()).clamp(0.0, 1.0)
}

/// `rs*(a, b) + rs*(b, a)`, in `[0, 2]`; 2 exactly for equal rectangles.
pub fn rho(a: &Rect, b: &Rect) -> f64 {
    area_inclusion(a, b) + area_inclusion(b, a)
}

/// `ρ / 2`, in `[0, 1]`.
pub fn rho_normalized(a: &Rect, b: &Rect) -> f64 {
    rho(a, b) / 2.0
}

/// `ρ(x, y) ≥ ρ(x, z)`.
pub fn rnear(x: &Rect, y: &Rect, z: &Rect) -> bool {
    rho(x, y) >= rho(x, z)
}

/// Betweenness over a finite family: every `w` other than `z` is no nearer
/// to `z` than one of `x`, `y`.
pub fn rbtw(z: &Rect, x: &Rect, y: &Rect, candidates: &[Rect]) -> bool {
    candidates.iter().all(|w| w == z || rnear(z, x, w) || rnear(z, y, w))
}

/// Smallest rectangle containing both.
pub fn extent(a: &Rect, b: &Rect) -> Rect {
    Rect {
        x1: a.x1.min(b.x1),
        y1: a.y1.min(b.y1),
        x2: a.x2.max(b.x2),
        y2: a.y2.max(b.y2),
    }
}

/// `z ⊆ extent(a, b)`.
pub fn between_extent(z: &Rect, a: &Rect, b: &Rect) -> bool {
    extent(a, b).contains(z)
}

/// Every rectangle with corners on the `steps × steps` grid of `bbox`.
pub fn grid_family(bbox: &Rect, steps: usize) -> Vec<Rect> {
    let xs: Vec<f64> = (0..=steps)
        .map(|i| bbox.x1 + bbox.width() * i as f64 / steps as f64)
        .collect();
    let ys: Vec<f64> = (0..=steps)
        .map(|i| bbox.y1 + bbox.height() * i as f64 / steps as f64)
        .collect();
    let mut out = Vec::new();
    for i in 0..steps {
        for j in i + 1..=steps {
            for k in 0..steps {
                for l in k + 1..=steps {
                    out.push(Rect {
                        x1: xs[i],
                        x2: xs[j],
                        y1: ys[k],
                        y2: ys[l],
                    });
                }
            }
        }
    }
    out
}

/// A robot reference `kind id`, e.g. `roomba 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RobotRef {
    pub kind: String,
    pub id: u32,
}

impl fmt::Display for RobotRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Constraint {
    Between {
        z: RobotRef,
        a: RobotRef,
        b: RobotRef,
    },
    NotBetween {
        z: RobotRef,
        a: RobotRef,
        b: RobotRef,
    },
    /// `robot` lies within `delta` of `a` and `b` (centroid distance) and
    /// `z` is between `a` and `b`.
    MaxDist {
        delta: f64,
        robot: RobotRef,
        z: RobotRef,
        a: RobotRef,
        b: RobotRef,
    },
}

impl Constraint {
    fn refs(&self) -> Vec<&RobotRef> {
        match self {
            Constraint::Between { z, a, b } | Constraint::NotBetween { z, a, b } => vec![z, a, b],
            Constraint::MaxDist { robot, z, a, b, .. } => vec![robot, z, a, b],
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Between { z, a, b } => write!(f, "(between {z} {a} {b})"),
            Constraint::NotBetween { z, a, b } => write!(f, "(not-between {z} {a} {b})"),
            Constraint::MaxDist { delta, robot, z, a, b } => {
                write!(f, "(max-dist {delta} {robot} (between {z} {a} {b}))")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Formation {
    pub name: String,
    pub constraints: Vec<Constraint>,
}

impl Formation {
    /// Robot ids mentioned by any constraint.
    pub fn robot_ids(&self) -> BTreeSet<u32> {
        self.constraints.iter().flat_map(|c| c.refs()).map(|r| r.id).collect()
    }
}

impl fmt::Display for Formation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}\n  (set", self.name)?;
        for c in &self.constraints {
            write!(f, "\n    {c}")?;
        }
        f.write_str("))")
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Vec<Spanned> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<(usize, char)> = line.chars().enumerate().collect();
        let mut i = 0;
        while i < chars.len() {
            let (col, c) = chars[i];
            let at = |tok| Spanned {
                tok,
                line: li + 1,
                column: col + 1,
            };
            match c {
                '(' => {
                    out.push(at(Tok::Open));
                    i += 1;
                }
                ')' => {
                    out.push(at(Tok::Close));
                    i += 1;
                }
                c if c.is_whitespace() => i += 1,
                _ => {
                    let start = i;
                    while i < chars.len() && !chars[i].1.is_whitespace() && chars[i].1 != '(' && chars[i].1 != ')' {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().map(|(_, c)| *c).collect();
                    out.push(at(Tok::Atom(word)));
                }
            }
        }
    }
    out
}

struct FormationParser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
    known: Option<&'a BTreeSet<u32>>,
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl FormationParser<'_> {
    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.column))
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(GeometryError::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn open(&mut self) -> Result<()> {
        match self.toks.get(self.pos).map(|t| &t.tok) {
            Some(Tok::Open) => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail("expected `(`"),
        }
    }

    fn close(&mut self) -> Result<()> {
        match self.toks.get(self.pos).map(|t| &t.tok) {
            Some(Tok::Close) => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail("expected `)`"),
        }
    }

    fn atom(&mut self, what: &str) -> Result<String> {
        match self.toks.get(self.pos).map(|t| &t.tok) {
            Some(Tok::Atom(a)) => {
                let a = a.clone();
                self.pos += 1;
                Ok(a)
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.toks.get(self.pos).map(|t| &t.tok) {
            Some(Tok::Atom(a)) if a == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail(format!("expected `{kw}`")),
        }
    }

    fn robot(&mut self) -> Result<RobotRef> {
        let kind = self.atom("robot kind")?;
        if !is_ident(&kind) {
            self.pos -= 1;
            return self.fail(format!("`{kind}` is not a robot kind"));
        }
        let (line, column) = self.here();
        let raw = self.atom("robot number")?;
        let id: u32 = match raw.parse() {
            Ok(v) if raw.bytes().all(|b| b.is_ascii_digit()) => v,
            _ => {
                self.pos -= 1;
                return self.fail(format!("`{raw}` is not a robot number"));
            }
        };
        if let Some(known) = self.known {
            if !known.contains(&id) {
                return Err(GeometryError::UnknownRobot { line, column, id });
            }
        }
        Ok(RobotRef { kind, id })
    }

    fn triple(&mut self) -> Result<(RobotRef, RobotRef, RobotRef)> {
        Ok((self.robot()?, self.robot()?, self.robot()?))
    }

    fn clause(&mut self) -> Result<Constraint> {
        self.open()?;
        let head = self.atom("clause keyword")?;
        let c = match head.as_str() {
            "between" => {
                let (z, a, b) = self.triple()?;
                Constraint::Between { z, a, b }
            }
            "not-between" => {
                let (z, a, b) = self.triple()?;
                Constraint::NotBetween { z, a, b }
            }
            "max-dist" => {
                let raw = self.atom("distance")?;
                let delta: f64 = match raw.parse() {
                    Ok(v) if f64::is_finite(v) => v,
                    _ => {
                        self.pos -= 1;
                        return self.fail(format!("`{raw}` is not a number"));
                    }
                };
                if delta <= 0.0 {
                    self.pos -= 1;
                    return self.fail("max-dist must be positive");
                }
                let robot = self.robot()?;
                self.open()?;
                self.keyword("between")?;
                let (z, a, b) = self.triple()?;
                self.close()?;
                Constraint::MaxDist { delta, robot, z, a, b }
            }
            _ => {
                self.pos -= 1;
                return self.fail(format!("unknown clause `{head}`"));
            }
        };
        self.close()?;
        Ok(c)
    }

    fn formation(&mut self) -> Result<Formation> {
        self.open()?;
        let name = self.atom("formation name")?;
        if !is_ident(&name) {
            self.pos -= 1;
            return self.fail(format!("`{name}` is not a name"));
        }
        self.open()?;
        self.keyword("set")?;
        let mut constraints = Vec::new();
        while matches!(self.toks.get(self.pos).map(|t| &t.tok), Some(Tok::Open)) {
            constraints.push(self.clause()?);
        }
        self.close()?;
        self.close()?;
        if self.pos != self.toks.len() {
            return self.fail("unexpected input after formation");
        }
        Ok(Formation { name, constraints })
    }
}

/// Parses a formation script. With `known`, robot numbers outside the set
/// are rejected.
pub fn parse_formation(text: &str, known: Option<&BTreeSet<u32>>) -> Result<Formation> {
    let lines: Vec<&str> = text.lines().collect();
    let end = match lines.last() {
        Some(l) => (lines.len(), l.chars().count() + 1),
        None => (1, 1),
    };
    FormationParser {
        toks: tokenize(text),
        pos: 0,
        end,
        known,
    }
    .formation()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub index: usize,
    pub constraint: String,
}

fn pose(poses: &BTreeMap<u32, Rect>, r: &RobotRef) -> Result<Rect> {
    poses.get(&r.id).copied().ok_or(GeometryError::MissingPose(r.id))
}

fn centroid_distance(a: &Rect, b: &Rect) -> f64 {
    let (ax, ay) = a.centroid();
    let (bx, by) = b.centroid();
    (ax - bx).hypot(ay - by)
}

/// Whether constraint `c` holds at `poses`.
pub fn holds(c: &Constraint, poses: &BTreeMap<u32, Rect>) -> Result<bool> {
    Ok(match c {
        Constraint::Between { z, a, b } => between_extent(&pose(poses, z)?, &pose(poses, a)?, &pose(poses, b)?),
        Constraint::NotBetween { z, a, b } => !between_extent(&pose(poses, z)?, &pose(poses, a)?, &pose(poses, b)?),
        Constraint::MaxDist { delta, robot, z, a, b } => {
            let (r, pa, pb) = (pose(poses, robot)?, pose(poses, a)?, pose(poses, b)?);
            between_extent(&pose(poses, z)?, &pa, &pb)
                && centroid_distance(&r, &pa).max(centroid_distance(&r, &pb)) <= delta + EPS
        }
    })
}

fn containment_deficit(outer: &Rect, z: &Rect) -> f64 {
    (outer.x1 - z.x1).max(0.0) + (z.x2 - outer.x2).max(0.0) + (outer.y1 - z.y1).max(0.0) + (z.y2 - outer.y2).max(0.0)
}

/// How far `c` is from holding: 0 when it holds, otherwise the total
/// distance by which containments and distance bounds are missed. A
/// not-between that fails measures the shortest way out of the extent.
pub fn violation_excess(c: &Constraint, poses: &BTreeMap<u32, Rect>) -> Result<f64> {
    Ok(match c {
        Constraint::Between { z, a, b } => {
            containment_deficit(&extent(&pose(poses, a)?, &pose(poses, b)?), &pose(poses, z)?)
        }
        Constraint::NotBetween { z, a, b } => {
            let (e, z) = (extent(&pose(poses, a)?, &pose(poses, b)?), pose(poses, z)?);
            if e.contains(&z) {
                (e.x2 - z.x2)
                    .min(z.x1 - e.x1)
                    .min(e.y2 - z.y2)
                    .min(z.y1 - e.y1)
                    .max(0.0)
                    + EPS
            } else {
                0.0
            }
        }
        Constraint::MaxDist { delta, robot, z, a, b } => {
            let (r, pa, pb) = (pose(poses, robot)?, pose(poses, a)?, pose(poses, b)?);
            let over = |d: f64| if d > delta + EPS { d - delta } else { 0.0 };
            containment_deficit(&extent(&pa, &pb), &pose(poses, z)?)
                + over(centroid_distance(&r, &pa))
                + over(centroid_distance(&r, &pb))
        }
    })
}

pub fn check_formation(formation: &Formation, poses: &BTreeMap<u32, Rect>) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for (index, c) in formation.constraints.iter().enumerate() {
        if !holds(c, poses)? {
            out.push(Violation {
                index,
                constraint: c.to_string(),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct World {
    pub bounds: Rect,
    pub cell: f64,
    pub goal: Rect,
    pub obstacles: Vec<Rect>,
    pub robots: BTreeMap<u32, Rect>,
}

impl World {
    pub fn nx(&self) -> usize {
        (self.bounds.width() / self.cell - EPS).ceil().max(1.0) as usize
    }

    pub fn ny(&self) -> usize {
        (self.bounds.height() / self.cell - EPS).ceil().max(1.0) as usize
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.bounds.x1 + (i as f64 + 0.5) * self.cell,
            self.bounds.y1 + (j as f64 + 0.5) * self.cell,
        )
    }

    /// Cell holding point `(x, y)`, clamped to the grid. Points on a cell
    /// boundary belong to the upper cell.
    pub fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let i = ((x - self.bounds.x1) / self.cell + 1e-7).floor().max(0.0) as usize;
        let j = ((y - self.bounds.y1) / self.cell + 1e-7).floor().max(0.0) as usize;
        (i.min(self.nx() - 1), j.min(self.ny() - 1))
    }

    /// Inside the bounds and clear of every obstacle.
    pub fn is_free(&self, r: &Rect) -> bool {
        self.bounds.contains(r) && !self.obstacles.iter().any(|o| o.overlaps(r))
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = |r: &Rect| format!("{} {} {} {}", r.x1, r.y1, r.x2, r.y2);
        writeln!(f, "bounds {}", r(&self.bounds))?;
        writeln!(f, "cell {}", self.cell)?;
        writeln!(f, "goal {}", r(&self.goal))?;
        for o in &self.obstacles {
            writeln!(f, "obstacle {}", r(o))?;
        }
        for (id, rect) in &self.robots {
            writeln!(f, "robot {id} {}", r(rect))?;
        }
        Ok(())
    }
}

/// Reads the line-based world format:
///
/// ```text
/// bounds x1 y1 x2 y2
/// cell size
/// goal x1 y1 x2 y2
/// obstacle x1 y1 x2 y2
/// robot id x1 y1 x2 y2
/// ```
///
/// `#` starts a comment.
pub fn parse_world(text: &str) -> Result<World> {
    let mut bounds = None;
    let mut cell = None;
    let mut goal = None;
    let mut obstacles = Vec::new();
    let mut robots = BTreeMap::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let err = |message: String| GeometryError::World { line, message };
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        let Some((&head, rest)) = words.split_first() else {
            continue;
        };
        let nums = |xs: &[&str], n: usize| -> Result<Vec<f64>> {
            if xs.len() != n {
                return Err(err(format!("`{head}` takes {n} numbers, got {}", xs.len())));
            }
            xs.iter()
                .map(|x| {
                    x.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| err(format!("`{x}` is not a number")))
                })
                .collect()
        };
        let rect = |v: Vec<f64>| Rect::new(v[0], v[1], v[2], v[3]).map_err(|e| err(e.to_string()));
        match head {
            "bounds" => bounds = Some(rect(nums(rest, 4)?)?),
            "goal" => goal = Some(rect(nums(rest, 4)?)?),
            "obstacle" => obstacles.push(rect(nums(rest, 4)?)?),
            "cell" => {
                let v = nums(rest, 1)?[0];
                if v <= 0.0 {
                    return Err(err("cell size must be positive".into()));
                }
                cell = Some(v);
            }
            "robot" => {
                let (id, coords) = rest.split_first().ok_or_else(|| err("`robot` needs an id".into()))?;
                let id: u32 = id.parse().map_err(|_| err(format!("`{id}` is not a robot id")))?;
                let r = rect(nums(coords, 4)?)?;
                if robots.insert(id, r).is_some() {
                    return Err(err(format!("robot {id} declared twice")));
                }
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    let missing = |what: &str| GeometryError::World {
        line: text.lines().count(),
        message: format!("missing `{what}`"),
    };
    let world = World {
        bounds: bounds.ok_or_else(|| missing("bounds"))?,
        cell: cell.ok_or_else(|| missing("cell"))?,
        goal: goal.ok_or_else(|| missing("goal"))?,
        obstacles,
        robots,
    };
    let invalid = |message: String| GeometryError::World { line: 0, message };
    if !world.bounds.contains(&world.goal) {
        return Err(invalid("goal lies outside the bounds".into()));
    }
    if world.obstacles.iter().any(|o| o.overlaps(&world.goal)) {
        return Err(invalid("goal overlaps an obstacle".into()));
    }
    for (id, r) in &world.robots {
        if !world.is_free(r) {
            return Err(invalid(format!(
                "robot {id} starts outside the bounds or on an obstacle"
            )));
        }
    }
    Ok(world)
}

/// Grid of path lengths (in cells) to the goal, for a body with the given
/// half-extents centered on each cell. `None` marks blocked or unreachable
/// cells.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    nx: usize,
    ny: usize,
    values: Vec<Option<u32>>,
}

impl PotentialField {
    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        self.values[j * self.nx + i]
    }

    /// Potential as a float, infinite where undefined.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.get(i, j).map_or(f64::INFINITY, f64::from)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }
}

/// 4-neighbour breadth-first flood from the goal cells. A cell is blocked
/// when a `2·hx × 2·hy` body centered on it leaves the bounds or overlaps
/// an obstacle; goal cells are the free cells whose center lies in the goal.
pub fn build_potential(world: &World, hx: f64, hy: f64) -> PotentialField {
    let (nx, ny) = (world.nx(), world.ny());
    let free: Vec<bool> = (0..nx * ny)
        .map(|k| {
            let (cx, cy) = world.cell_center(k % nx, k / nx);
            world.is_free(&Rect::centered(cx, cy, hx, hy))
        })
        .collect();
    let mut values = vec![None; nx * ny];
    let mut queue = VecDeque::new();
    for k in 0..nx * ny {
        let (cx, cy) = world.cell_center(k % nx, k / nx);
        let g = &world.goal;
        if free[k] && cx >= g.x1 && cx <= g.x2 && cy >= g.y1 && cy <= g.y2 {
            values[k] = Some(0);
            queue.push_back(k);
        }
    }
    while let Some(k) = queue.pop_front() {
        let (i, j) = (k % nx, k / nx);
        let d = values[k].expect("queued cells are labelled") + 1;
        let mut visit = |ii: usize, jj: usize| {
            let n = jj * nx + ii;
            if free[n] && values[n].is_none() {
                values[n] = Some(d);
                queue.push_back(n);
            }
        };
        if i > 0 {
            visit(i - 1, j);
        }
        if i + 1 < nx {
            visit(i + 1, j);
        }
        if j > 0 {
            visit(i, j - 1);
        }
        if j + 1 < ny {
            visit(i, j + 1);
        }
    }
    PotentialField { nx, ny, values }
}

/// Candidate moves in cells, stay first. The order fixes tie-breaks.
const MOVES: [(i64, i64); 9] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (-1, 0),
    (0, -1),
    (1, 1),
    (-1, 1),
    (-1, -1),
    (1, -1),
];

/// Consecutive steps with no motion before a run is declared deadlocked.
pub const STALL_LIMIT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NavStatus {
    Reached,
    Unreachable,
    Deadlock,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepKind {
    Start,
    /// The leader moved down the field.
    Advance,
    /// The leader held still while followers repaired the formation.
    Repair,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobotState {
    pub id: u32,
    pub rect: Rect,
    pub potential: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub kind: StepKind,
    pub robots: Vec<RobotState>,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NavLog {
    pub status: NavStatus,
    pub leader: u32,
    pub steps: Vec<StepRecord>,
}

impl NavLog {
    pub fn final_step(&self) -> &StepRecord {
        self.steps.last().expect("log holds the start state")
    }

    /// Robot-step pairs overlapping an obstacle.
    pub fn obstacle_overlaps(&self, world: &World) -> usize {
        self.steps
            .iter()
            .flat_map(|s| &s.robots)
            .filter(|r| world.obstacles.iter().any(|o| o.overlaps(&r.rect)))
            .count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,robot,x1,y1,x2,y2,potential,violations\n");
        for s in &self.steps {
            for r in &s.robots {
                let p = if r.potential.is_finite() {
                    r.potential.to_string()
                } else {
                    "inf".into()
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    s.step,
                    r.id,
                    fmt_coord(r.rect.x1),
                    fmt_coord(r.rect.y1),
                    fmt_coord(r.rect.x2),
                    fmt_coord(r.rect.y2),
                    p,
                    s.violations
                );
            }
        }
        out
    }

    /// Obstacles grey, goal green, one centroid polyline per robot and the
    /// final robot rectangles.
    pub fn to_svg(&self, world: &World) -> String {
        const COLORS: [&str; 6] = ["#d62728", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"];
        let b = world.bounds;
        let scale = 800.0 / b.width().max(b.height());
        let (w, h) = (b.width() * scale, b.height() * scale);
        let px = |x: f64| fmt_coord((x - b.x1) * scale);
        let py = |y: f64| fmt_coord((b.y2 - y) * scale);
        let rect = |r: &Rect, style: &str| {
            format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" {style}/>\n",
                px(r.x1),
                py(r.y2),
                fmt_coord(r.width() * scale),
                fmt_coord(r.height() * scale)
            )
        };
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
            fmt_coord(w),
            fmt_coord(h),
            fmt_coord(w),
            fmt_coord(h)
        );
        out += &rect(&b, "fill=\"white\" stroke=\"black\"");
        out += &rect(&world.goal, "fill=\"#2ca02c\" fill-opacity=\"0.5\"");
        for o in &world.obstacles {
            out += &rect(o, "fill=\"grey\"");
        }
        let ids: Vec<u32> = self.steps[0].robots.iter().map(|r| r.id).collect();
        for (k, id) in ids.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let points: Vec<String> = self
                .steps
                .iter()
                .filter_map(|s| s.robots.iter().find(|r| r.id == *id))
                .map(|r| {
                    let (cx, cy) = r.rect.centroid();
                    format!("{},{}", px(cx), py(cy))
                })
                .collect();
            let _ = writeln!(
                out,
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                points.join(" ")
            );
            if let Some(r) = self.final_step().robots.iter().find(|r| r.id == *id) {
                out += &rect(&r.rect, &format!("fill=\"none\" stroke=\"{color}\""));
            }
        }
        out += "</svg>\n";
        out
    }
}

fn fmt_coord(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        r.to_string()
    }
}

struct Robot {
    id: u32,
    start: Rect,
    offset: (i64, i64),
}

impl Robot {
    fn at(&self, world: &World, off: (i64, i64)) -> Rect {
        self.start
            .translate(off.0 as f64 * world.cell, off.1 as f64 * world.cell)
    }
}

fn potential_at(world: &World, field: &PotentialField, r: &Rect) -> f64 {
    let (cx, cy) = r.centroid();
    let (i, j) = world.cell_of(cx, cy);
    field.value(i, j)
}

/// Runs the formation for at most `max_steps` steps.
///
/// The leader (lowest id) reads a field inflated by the whole formation's
/// half-extent around it; followers read a field inflated by their own
/// half-extent. Each step, if the formation is violated the leader holds
/// still; otherwise it tries its strictly-better neighbour cells, lowest
/// potential first. Followers then, in id order, pick among staying and
/// their eight neighbour moves the one minimizing (violations, excess,
/// potential), where potential only counts for violation-free moves. The
/// leader has right of way: a follower it bumps must step aside, and a
/// leader move after which some robots still overlap is undone. No robot
/// ever ends a step on an obstacle, outside the bounds, or on another
/// robot.
pub fn navigate(world: &World, formation: &Formation, max_steps: usize) -> Result<NavLog> {
    let leader_id = *world.robots.keys().next().ok_or(GeometryError::NoRobots)?;
    for id in formation.robot_ids() {
        if !world.robots.contains_key(&id) {
            return Err(GeometryError::MissingPose(id));
        }
    }
    let mut robots: Vec<Robot> = world
        .robots
        .iter()
        .map(|(&id, &start)| Robot {
            id,
            start,
            offset: (0, 0),
        })
        .collect();
    let leader_rect = robots[0].start;
    let (lx, ly) = leader_rect.centroid();
    let (mut hx, mut hy) = (0.0f64, 0.0f64);
    for r in &robots {
        hx = hx.max((r.start.x1 - lx).abs()).max((r.start.x2 - lx).abs());
        hy = hy.max((r.start.y1 - ly).abs()).max((r.start.y2 - ly).abs());
    }
    let leader_field = build_potential(world, hx, hy);
    let follower_fields: Vec<PotentialField> = robots
        .iter()
        .map(|r| build_potential(world, r.start.width() / 2.0, r.start.height() / 2.0))
        .collect();

    let poses =
        |robots: &[Robot]| -> BTreeMap<u32, Rect> { robots.iter().map(|r| (r.id, r.at(world, r.offset))).collect() };
    let record = |robots: &[Robot], step: usize, kind: StepKind| -> Result<StepRecord> {
        let p = poses(robots);
        let violations = check_formation(formation, &p)?.len();
        let states = robots
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let rect = p[&r.id];
                let field = if k == 0 { &leader_field } else { &follower_fields[k] };
                RobotState {
                    id: r.id,
                    rect,
                    potential: potential_at(world, field, &rect),
                }
            })
            .collect();
        Ok(StepRecord {
            step,
            kind,
            robots: states,
            violations,
        })
    };

    let mut steps = vec![record(&robots, 0, StepKind::Start)?];
    if !potential_at(world, &leader_field, &leader_rect).is_finite() {
        return Ok(NavLog {
            status: NavStatus::Unreachable,
            leader: leader_id,
            steps,
        });
    }
    let mut stalls = 0;
    let mut status = NavStatus::BudgetExhausted;
    for step in 1..=max_steps {
        let prev = steps.last().expect("nonempty");
        if prev.violations == 0 && prev.robots[0].potential == 0.0 {
            status = NavStatus::Reached;
            break;
        }
        let mut kind = StepKind::Repair;
        let before: Vec<(i64, i64)> = robots.iter().map(|r| r.offset).collect();
        if prev.violations == 0 {
            let here = prev.robots[0].potential;
            let mut options: Vec<(f64, usize, (i64, i64))> = Vec::new();
            for (m, &(dx, dy)) in MOVES.iter().enumerate().skip(1) {
                let off = (before[0].0 + dx, before[0].1 + dy);
                let rect = robots[0].at(world, off);
                let p = potential_at(world, &leader_field, &rect);
                if p < here && world.is_free(&rect) {
                    options.push((p, m, off));
                }
            }
            options.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for &(_, _, off) in &options {
                robots[0].offset = off;
                follower_pass(world, formation, &follower_fields, &mut robots)?;
                if !any_overlap(world, &robots) {
                    kind = StepKind::Advance;
                    break;
                }
                for (r, &o) in robots.iter_mut().zip(&before) {
                    r.offset = o;
                }
            }
        }
        if kind == StepKind::Repair {
            follower_pass(world, formation, &follower_fields, &mut robots)?;
        }
        let moved = robots.iter().zip(&before).any(|(r, &o)| r.offset != o);
        steps.push(record(&robots, step, kind)?);
        stalls = if moved { 0 } else { stalls + 1 };
        if stalls >= STALL_LIMIT {
            status = NavStatus::Deadlock;
            break;
        }
    }
    if status == NavStatus::BudgetExhausted {
        let last = steps.last().expect("nonempty");
        if last.violations == 0 && last.robots[0].potential == 0.0 {
            status = NavStatus::Reached;
        }
    }
    Ok(NavLog {
        status,
        leader: leader_id,
        steps,
    })
}

fn better_score(a: &(usize, f64, f64), b: &(usize, f64, f64)) -> bool {
    if a.0 != b.0 {
        a.0 < b.0
    } else if (a.1 - b.1).abs() > EPS {
        a.1 < b.1
    } else {
        a.2 < b.2
    }
}

fn any_overlap(world: &World, robots: &[Robot]) -> bool {
    let rects: Vec<Rect> = robots.iter().map(|r| r.at(world, r.offset)).collect();
    rects
        .iter()
        .enumerate()
        .any(|(i, a)| rects[i + 1..].iter().any(|b| a.overlaps(b)))
}

/// (violations, total excess, potential); lower is better.
type MoveScore = (usize, f64, f64);

/// Moves each follower in id order to the free neighbour cell (or its
/// current cell) minimizing the violation count, then the total violation
/// excess, then, among moves that leave no violation, potential; staying
/// wins ties. The sweep repeats until it settles or once per robot. A cell is free when it is inside
/// the bounds and overlaps no obstacle and no other robot.
fn follower_pass(world: &World, formation: &Formation, fields: &[PotentialField], robots: &mut [Robot]) -> Result<()> {
    for _ in 0..robots.len() {
        let mut changed = false;
        for k in 1..robots.len() {
            let mut poses: BTreeMap<u32, Rect> = robots.iter().map(|r| (r.id, r.at(world, r.offset))).collect();
            let mut best: Option<((i64, i64), MoveScore)> = None;
            for &(dx, dy) in &MOVES {
                let off = (robots[k].offset.0 + dx, robots[k].offset.1 + dy);
                let rect = robots[k].at(world, off);
                let blocked = !world.is_free(&rect)
                    || robots
                        .iter()
                        .enumerate()
                        .any(|(m, o)| m != k && o.at(world, o.offset).overlaps(&rect));
                if blocked {
                    continue;
                }
                poses.insert(robots[k].id, rect);
                let violations = check_formation(formation, &poses)?.len();
                let mut excess = 0.0;
                for c in &formation.constraints {
                    excess += violation_excess(c, &poses)?;
                }
                // advancing only counts once the formation holds
                let potential = if violations == 0 {
                    potential_at(world, &fields[k], &rect)
                } else {
                    0.0
                };
                let score = (violations, excess, potential);
                if best.as_ref().is_none_or(|(_, b)| better_score(&score, b)) {
                    best = Some((off, score));
                }
            }
            if let Some((off, _)) = best {
                if off != robots[k].offset {
                    robots[k].offset = off;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(())
}
