//! Set specifications and run configuration.
//!
//! A set spec is a JSON document tagged by `kind`; every coordinate is a
//! rational written as a `"num/den"` (or integer) string.
//!
//! ```json
//! { "kind": "spider", "dim": 2, "apex": ["0", "0"], "tips": [["1", "0"], ["0", "1"]] }
//! ```

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{affine_dim, determinant, Point, Spider};
use crate::grid::DEFAULT_CELL_CAP;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    #[serde(with = "crate::rational::vec_str")]
    pub lo: Point,
    #[serde(with = "crate::rational::vec_str")]
    pub hi: Point,
}

/// Vertex list of a convex polygon (any order; the hull is used).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolygonSpec(#[serde(with = "crate::rational::vecs_str")] pub Vec<Point>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SetSpec {
    /// Union of segments `[apex, tip_i]`.
    Spider {
        dim: usize,
        #[serde(with = "crate::rational::vec_str")]
        apex: Point,
        #[serde(with = "crate::rational::vecs_str")]
        tips: Vec<Point>,
    },
    /// The convex hull of the points.
    Hull {
        dim: usize,
        #[serde(with = "crate::rational::vecs_str")]
        points: Vec<Point>,
    },
    /// Union of closed axis-parallel boxes.
    BoxUnion { dim: usize, boxes: Vec<BoxSpec> },
    /// Convex polygon `outer` minus the interiors of convex `bites`.
    PlanarHoles { dim: usize, outer: PolygonSpec, bites: Vec<PolygonSpec> },
    /// `{ matrix x + translation : x in inner }`.
    Affine {
        dim: usize,
        #[serde(with = "crate::rational::vecs_str")]
        matrix: Vec<Point>,
        #[serde(with = "crate::rational::vec_str")]
        translation: Point,
        inner: Box<SetSpec>,
    },
}

fn invalid(path: String, reason: impl Into<String>) -> Error {
    Error::InvalidSpec { path, reason: reason.into() }
}

fn check_point(p: &[Rational], d: usize, path: String) -> Result<()> {
    if p.len() != d {
        return Err(invalid(path, format!("dimension {}, expected {d}", p.len())));
    }
    Ok(())
}

fn join(prefix: &str, field: &str) -> String {
    if prefix.is_empty() {
        field.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

/// Parse and validate a set-spec document. Errors carry the JSON path of the
/// offending value.
pub fn parse_spec(text: &str) -> Result<SetSpec> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| invalid(String::new(), e.to_string()))?;
    let spec = from_value(value, "")?;
    spec.validate()?;
    Ok(spec)
}

// Field sets per kind. Internally tagged enums buffer their input, which
// loses error locations, so the tag is dispatched by hand.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpiderFields {
    dim: usize,
    #[serde(with = "crate::rational::vec_str")]
    apex: Point,
    #[serde(with = "crate::rational::vecs_str")]
    tips: Vec<Point>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HullFields {
    dim: usize,
    #[serde(with = "crate::rational::vecs_str")]
    points: Vec<Point>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxUnionFields {
    dim: usize,
    boxes: Vec<BoxSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanarFields {
    dim: usize,
    outer: PolygonSpec,
    bites: Vec<PolygonSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AffineFields {
    dim: usize,
    #[serde(with = "crate::rational::vecs_str")]
    matrix: Vec<Point>,
    #[serde(with = "crate::rational::vec_str")]
    translation: Point,
}

fn fields<T: serde::de::DeserializeOwned>(value: serde_json::Value, at: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { at.to_string() } else { join(at, &path) };
        invalid(path, e.into_inner().to_string())
    })
}

fn from_value(mut value: serde_json::Value, at: &str) -> Result<SetSpec> {
    let obj = value.as_object_mut().ok_or_else(|| invalid(at.to_string(), "expected an object"))?;
    let kind = match obj.remove("kind") {
        Some(serde_json::Value::String(k)) => k,
        Some(_) => return Err(invalid(join(at, "kind"), "expected a string")),
        None => return Err(invalid(at.to_string(), "missing field `kind`")),
    };
    Ok(match kind.as_str() {
        "spider" => {
            let f: SpiderFields = fields(value, at)?;
            SetSpec::Spider { dim: f.dim, apex: f.apex, tips: f.tips }
        }
        "hull" => {
            let f: HullFields = fields(value, at)?;
            SetSpec::Hull { dim: f.dim, points: f.points }
        }
        "box-union" => {
            let f: BoxUnionFields = fields(value, at)?;
            SetSpec::BoxUnion { dim: f.dim, boxes: f.boxes }
        }
        "planar-holes" => {
            let f: PlanarFields = fields(value, at)?;
            SetSpec::PlanarHoles { dim: f.dim, outer: f.outer, bites: f.bites }
        }
        "affine" => {
            let inner_at = join(at, "inner");
            let inner = obj.remove("inner").ok_or_else(|| invalid(at.to_string(), "missing field `inner`"))?;
            let inner = from_value(inner, &inner_at)?;
            let f: AffineFields = fields(value, at)?;
            SetSpec::Affine { dim: f.dim, matrix: f.matrix, translation: f.translation, inner: Box::new(inner) }
        }
        other => return Err(invalid(join(at, "kind"), format!("unknown kind {other:?}"))),
    })
}

impl SetSpec {
    pub fn dim(&self) -> usize {
        match self {
            Self::Spider { dim, .. }
            | Self::Hull { dim, .. }
            | Self::BoxUnion { dim, .. }
            | Self::PlanarHoles { dim, .. }
            | Self::Affine { dim, .. } => *dim,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Spider { .. } => "spider",
            Self::Hull { .. } => "hull",
            Self::BoxUnion { .. } => "box-union",
            Self::PlanarHoles { .. } => "planar-holes",
            Self::Affine { .. } => "affine",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialises")
    }

    pub fn from_spider(s: &Spider) -> Self {
        Self::Spider { dim: s.dim(), apex: s.apex().clone(), tips: s.tips().to_vec() }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_at("")
    }

    fn validate_at(&self, at: &str) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Err(invalid(join(at, "dim"), "dimension must be positive"));
        }
        match self {
            Self::Spider { apex, tips, .. } => {
                check_point(apex, d, join(at, "apex"))?;
                if tips.is_empty() {
                    return Err(invalid(join(at, "tips"), "at least one tip required"));
                }
                for (i, t) in tips.iter().enumerate() {
                    check_point(t, d, join(at, &format!("tips[{i}]")))?;
                    if t == apex {
                        return Err(invalid(join(at, &format!("tips[{i}]")), "tip coincides with apex"));
                    }
                }
            }
            Self::Hull { points, .. } => {
                if points.is_empty() {
                    return Err(invalid(join(at, "points"), "at least one point required"));
                }
                for (i, p) in points.iter().enumerate() {
                    check_point(p, d, join(at, &format!("points[{i}]")))?;
                }
            }
            Self::BoxUnion { boxes, .. } => {
                if boxes.is_empty() {
                    return Err(invalid(join(at, "boxes"), "at least one box required"));
                }
                for (i, b) in boxes.iter().enumerate() {
                    check_point(&b.lo, d, join(at, &format!("boxes[{i}].lo")))?;
                    check_point(&b.hi, d, join(at, &format!("boxes[{i}].hi")))?;
                    if b.lo.iter().zip(&b.hi).any(|(l, h)| l > h) {
                        return Err(invalid(join(at, &format!("boxes[{i}]")), "lo exceeds hi"));
                    }
                }
            }
            Self::PlanarHoles { outer, bites, .. } => {
                if d != 2 {
                    return Err(invalid(join(at, "dim"), "planar-holes requires dim 2"));
                }
                let polygon = |p: &PolygonSpec, path: String| -> Result<()> {
                    for (i, v) in p.0.iter().enumerate() {
                        check_point(v, 2, format!("{path}[{i}]"))?;
                    }
                    if p.0.len() < 3 || affine_dim(&p.0) < 2 {
                        return Err(invalid(path, "polygon must have non-empty interior"));
                    }
                    Ok(())
                };
                polygon(outer, join(at, "outer"))?;
                for (i, b) in bites.iter().enumerate() {
                    polygon(b, join(at, &format!("bites[{i}]")))?;
                }
            }
            Self::Affine { matrix, translation, inner, .. } => {
                if matrix.len() != d {
                    return Err(invalid(join(at, "matrix"), format!("{} rows, expected {d}", matrix.len())));
                }
                for (i, row) in matrix.iter().enumerate() {
                    check_point(row, d, join(at, &format!("matrix[{i}]")))?;
                }
                check_point(translation, d, join(at, "translation"))?;
                if inner.dim() != d {
                    return Err(invalid(join(at, "inner.dim"), format!("dimension {}, expected {d}", inner.dim())));
                }
                inner.validate_at(&join(at, "inner"))?;
            }
        }
        Ok(())
    }

    /// `|det|` of the composed affine wrappers (1 without wrappers).
    pub fn volume_factor(&self) -> Rational {
        match self {
            Self::Affine { matrix, inner, .. } => rational::abs(&determinant(matrix)) * inner.volume_factor(),
            _ => rational::int(1),
        }
    }

    /// Volume statements need every affine wrapper to be invertible.
    pub fn require_volume_semantics(&self) -> Result<()> {
        if let Self::Affine { matrix, inner, .. } = self {
            if determinant(matrix).is_zero() {
                return Err(Error::SingularAffine);
            }
            inner.require_volume_semantics()?;
        }
        Ok(())
    }
}

/// Audit settings embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub k_max: u64,
    /// Grid spacings tried in order; strictly decreasing.
    #[serde(with = "crate::rational::vec_str")]
    pub resolutions: Vec<Rational>,
    pub tol: f64,
    pub cap: u64,
    pub workers: usize,
    pub out: Option<String>,
    pub csv: Option<String>,
    pub expect_monotone: bool,
    /// Measure `d_H((1/k) A[k], conv A)` at the first resolution.
    pub hausdorff: bool,
}

/// `h0, h0/r, h0/r^2, ...` with `refinements` extra levels.
pub fn schedule(h0: &Rational, refine: u64, refinements: u32) -> Vec<Rational> {
    let r = Rational::from_integer(refine.into());
    let mut out = vec![h0.clone()];
    for _ in 0..refinements {
        let next = out.last().expect("non-empty") / &r;
        out.push(next);
    }
    out
}

/// Default starting spacing: `1/64` in the plane, `1/16` in space.
pub fn default_h0(d: usize) -> Rational {
    if d <= 2 {
        rational::rat(1, 64)
    } else {
        rational::rat(1, 16)
    }
}

impl RunConfig {
    pub fn for_dim(d: usize, k_max: u64) -> Self {
        Self {
            k_max,
            resolutions: schedule(&default_h0(d), 2, 4),
            tol: 1e-9,
            cap: DEFAULT_CELL_CAP,
            workers: 0,
            out: None,
            csv: None,
            expect_monotone: false,
            hausdorff: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max < 2 {
            return Err(invalid("k_max".into(), "must be at least 2"));
        }
        if self.resolutions.is_empty() {
            return Err(invalid("resolutions".into(), "empty schedule"));
        }
        if self.resolutions.iter().any(|h| !h.is_positive()) {
            return Err(invalid("resolutions".into(), "spacings must be positive"));
        }
        if self.resolutions.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("resolutions".into(), "spacings must strictly decrease"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(invalid("tol".into(), "must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn axis_spider_document() {
        let s = parse_spec(r#"{"kind":"spider","dim":2,"apex":["0","0"],"tips":[["1","0"],["0","1"]]}"#).unwrap();
        match &s {
            SetSpec::Spider { tips, .. } => assert_eq!(tips.len(), 2),
            _ => panic!("wrong kind"),
        }
        assert_eq!(SetSpec::from_spider(&Spider::axis(2)), s);
    }

    #[test]
    fn mixed_tip_dimension_names_the_tip() {
        let err = parse_spec(r#"{"kind":"spider","dim":2,"apex":["0","0"],"tips":[["1","0"],["0","1","2"]]}"#).unwrap_err();
        match err {
            Error::InvalidSpec { path, .. } => assert_eq!(path, "tips[1]"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn located_parse_errors() {
        let err = parse_spec(r#"{"kind":"hull","dim":2,"points":[["1","0"],["x","1"]]}"#).unwrap_err();
        match err {
            Error::InvalidSpec { path, reason } => {
                assert_eq!(path, "points");
                assert!(reason.contains("invalid rational"));
            }
            e => panic!("{e}"),
        }
        let err = parse_spec(r#"{"kind":"blob","dim":2}"#).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec { .. }));
        let err = parse_spec(r#"{"kind":"box-union","dim":2,"boxes":[{"lo":["0","0"],"hi":["1","1"],"x":1}]}"#).unwrap_err();
        match err {
            Error::InvalidSpec { path, .. } => assert!(path.starts_with("boxes[0]"), "{path}"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn nested_paths() {
        let doc = r#"{"kind":"affine","dim":2,"matrix":[["1","0"],["0","1"]],"translation":["0","0"],
            "inner":{"kind":"box-union","dim":2,"boxes":[{"lo":["1","0"],"hi":["0","1"]}]}}"#;
        match parse_spec(doc).unwrap_err() {
            Error::InvalidSpec { path, .. } => assert_eq!(path, "inner.boxes[0]"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn singular_affine_only_blocks_volumes() {
        let doc = r#"{"kind":"affine","dim":2,"matrix":[["1","2"],["2","4"]],"translation":["0","0"],
            "inner":{"kind":"spider","dim":2,"apex":["0","0"],"tips":[["1","0"],["0","1"]]}}"#;
        let s = parse_spec(doc).unwrap();
        assert_eq!(s.require_volume_semantics(), Err(Error::SingularAffine));
        assert_eq!(s.volume_factor(), int(0));
    }

    #[test]
    fn planar_holes_needs_the_plane() {
        let doc = r#"{"kind":"planar-holes","dim":3,"outer":[["0","0","0"]],"bites":[]}"#;
        assert!(matches!(parse_spec(doc), Err(Error::InvalidSpec { .. })));
    }

    #[test]
    fn run_config_checks() {
        let mut c = RunConfig::for_dim(2, 4);
        assert_eq!(c.resolutions.len(), 5);
        assert_eq!(c.resolutions[4], rat(1, 1024));
        c.validate().unwrap();
        c.resolutions = vec![rat(1, 8), rat(1, 8)];
        assert!(c.validate().is_err());
        c = RunConfig::for_dim(3, 1);
        assert!(c.validate().is_err());
    }

    fn rational_strategy() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..12).prop_map(|(n, d)| rat(n, d))
    }

    fn point(d: usize) -> impl Strategy<Value = Point> {
        prop::collection::vec(rational_strategy(), d)
    }

    fn leaf(d: usize) -> impl Strategy<Value = SetSpec> {
        let spider = (point(d), prop::collection::vec(point(d), 1..5))
            .prop_map(move |(apex, tips)| SetSpec::Spider { dim: d, apex, tips });
        let hull = prop::collection::vec(point(d), 1..6).prop_map(move |points| SetSpec::Hull { dim: d, points });
        let boxes = prop::collection::vec((point(d), point(d)), 1..4).prop_map(move |pairs| SetSpec::BoxUnion {
            dim: d,
            boxes: pairs.into_iter().map(|(lo, hi)| BoxSpec { lo, hi }).collect(),
        });
        let planar = (prop::collection::vec(point(2), 3..6), prop::collection::vec(prop::collection::vec(point(2), 3..5), 0..3))
            .prop_map(|(outer, bites)| SetSpec::PlanarHoles {
                dim: 2,
                outer: PolygonSpec(outer),
                bites: bites.into_iter().map(PolygonSpec).collect(),
            });
        prop_oneof![spider, hull, boxes, planar]
    }

    fn any_spec() -> impl Strategy<Value = SetSpec> {
        (1usize..4).prop_flat_map(|d| {
            leaf(d).prop_recursive(2, 8, 1, |inner| {
                inner.prop_flat_map(|s| {
                    let d = s.dim();
                    (prop::collection::vec(point(d), d), point(d)).prop_map(move |(matrix, translation)| SetSpec::Affine {
                        dim: d,
                        matrix,
                        translation,
                        inner: Box::new(s.clone()),
                    })
                })
            })
        })
    }

    proptest! {
        #[test]
        fn serialise_round_trip(spec in any_spec()) {
            let text = spec.to_json();
            let de = &mut serde_json::Deserializer::from_str(&text);
            let back: SetSpec = serde_path_to_error::deserialize(de).unwrap();
            prop_assert_eq!(&back, &spec);
            // Validation is a function of the document alone.
            match parse_spec(&text) {
                Ok(parsed) => prop_assert_eq!(parsed, spec),
                Err(_) => prop_assert!(spec.validate().is_err()),
            }
        }

        #[test]
        fn run_config_round_trip(k in 2u64..20, levels in 0u32..6) {
            let mut c = RunConfig::for_dim(2, k);
            c.resolutions = schedule(&rat(1, 16), 2, levels);
            let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
