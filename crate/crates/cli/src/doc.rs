//! JSON documents. Every rational is a string, `"num/den"` or an integer;
//! finite decimals are accepted on input (as strings or JSON numbers) and
//! converted exactly.

use std::fmt;
use std::path::Path;

use polycolor::error::{Error, Result};
use polycolor::geometry::{format_rational, parse_rational, ConvexPolygon, Homothet, Point2, Rational};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A rational in document form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Q;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as \"num/den\", an integer, or a finite decimal")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Q, E> {
                parse_rational(v).map(Q).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Q, E> {
                self.visit_str(&v.to_string())
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Q, E> {
                self.visit_str(&v.to_string())
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Q, E> {
                // shortest round-trip text of the float, read as a decimal
                let text = format!("{v:?}");
                if text.contains(['e', 'E']) || !v.is_finite() {
                    return Err(E::custom(format!("unsupported number {text}; write it as \"num/den\"")));
                }
                self.visit_str(&text)
            }
        }
        d.deserialize_any(V)
    }
}

pub type Pair = [Q; 2];

pub fn pair(p: &Point2) -> Pair {
    [Q(p.x.clone()), Q(p.y.clone())]
}

pub fn point(p: &Pair) -> Point2 {
    Point2::new(p[0].0.clone(), p[1].0.clone())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_d: Option<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Q>,
}

impl Parameters {
    fn is_empty(&self) -> bool {
        *self == Parameters::default()
    }
}

/// Polygon, points, and optionally colors. Unknown keys are ignored, so
/// the output of `color` reads back as an instance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<Pair>>,
    #[serde(default)]
    pub points: Vec<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Parameters::is_empty")]
    pub parameters: Parameters,
}

fn read(path: &Path) -> Result<serde_json::Value> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn from_value<T: for<'de> Deserialize<'de>>(v: serde_json::Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::InvalidArgument(format!("malformed {what}: {e}")))
}

/// Either a full document or a bare JSON array of points.
pub fn load_instance(path: &Path) -> Result<InstanceDocument> {
    let v = read(path)?;
    if v.is_array() {
        Ok(InstanceDocument { points: from_value(v, "points")?, ..Default::default() })
    } else {
        from_value(v, "instance document")
    }
}

/// The array itself, or the array stored under `key`.
fn array_or_field<T: for<'de> Deserialize<'de>>(path: &Path, key: &str) -> Result<T> {
    let mut v = read(path)?;
    if !v.is_array() {
        v = v
            .get_mut(key)
            .map(serde_json::Value::take)
            .ok_or_else(|| Error::InvalidArgument(format!("{}: no {key:?} field", path.display())))?;
    }
    from_value(v, key)
}

/// `square` and `triangle` name the built-in bodies; anything else is a file.
pub fn load_polygon(spec: &str) -> Result<ConvexPolygon> {
    match spec {
        "square" => Ok(ConvexPolygon::square()),
        "triangle" => Ok(ConvexPolygon::triangle()),
        path => polygon_from(&array_or_field::<Vec<Pair>>(Path::new(path), "polygon")?),
    }
}

pub fn polygon_from(vs: &[Pair]) -> Result<ConvexPolygon> {
    ConvexPolygon::new(vs.iter().map(point).collect())
}

pub fn load_colors(path: &Path) -> Result<Vec<u32>> {
    array_or_field(path, "colors")
}

pub fn homothet_doc(h: &Homothet) -> serde_json::Value {
    serde_json::json!({ "center": pair(&h.center), "scale": Q(h.scale.clone()) })
}

/// `"cx,cy,s"` with rational components.
pub fn parse_homothet(text: &str) -> Result<Homothet> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidArgument(format!("expected \"cx,cy,s\", got {text:?}")));
    }
    let v: Vec<Rational> = parts.iter().map(|p| parse_rational(p)).collect::<Result<_>>()?;
    let h = Homothet::new(Point2::new(v[0].clone(), v[1].clone()), v[2].clone());
    if h.scale <= Rational::from_integer(0.into()) {
        return Err(Error::InvalidArgument("homothet scale must be positive".into()));
    }
    Ok(h)
}
