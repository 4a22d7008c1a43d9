//! Hexagonal multi-site layout with wrap-around, and device drops.
//!
//! Sites sit on a hexagonal lattice with inter-site distance `isd`. Each site
//! carries three sector base stations with boresights at 0°, 120° and 240°.
//! The site cell is the hexagon with vertices at azimuths 0°, 60°, …, so each
//! sector covers exactly one rhombus of it.
//!
//! Wrap-around is obtained by tiling the plane with copies of the whole
//! cluster. The six translations of the first ring of copies are the standard
//! mirror displacements; distance queries minimise over the identity, the
//! first ring and the second ring so that the result equals the minimum over
//! every periodic image for any pair of points inside the cluster.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or displacement in the horizontal plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const ORIGIN: Position = Position { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn polar(radius: f64, azimuth_deg: f64) -> Self {
        let a = azimuth_deg.to_radians();
        Self::new(radius * a.cos(), radius * a.sin())
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Azimuth in degrees, in (-180, 180].
    pub fn azimuth_deg(self) -> f64 {
        self.y.atan2(self.x).to_degrees()
    }

    pub fn dot(self, o: Position) -> f64 {
        self.x * o.x + self.y * o.y
    }
}

impl std::ops::Add for Position {
    type Output = Position;
    fn add(self, o: Position) -> Position {
        Position::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Position {
    type Output = Position;
    fn sub(self, o: Position) -> Position {
        Position::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Position {
    type Output = Position;
    fn mul(self, s: f64) -> Position {
        Position::new(self.x * s, self.y * s)
    }
}

/// Sector base station.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaseStation {
    pub id: usize,
    pub site: usize,
    pub position: Position,
    /// Boresight azimuth of the sector antenna, degrees.
    pub sector_azimuth: f64,
    pub antennas: usize,
    pub height: f64,
    pub downtilt: f64,
    pub tx_power_dbm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UserEquipment {
    pub id: usize,
    pub position: Position,
    /// Sector the UE was dropped in (not necessarily the serving one).
    pub dropped_in: usize,
    /// Serving base station, filled in by [`associate_ues`].
    pub serving_bs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WiFiKind {
    Ap,
    Sta,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WiFiDevice {
    pub id: usize,
    pub kind: WiFiKind,
    pub cluster: usize,
    /// Sector hosting the cluster.
    pub sector: usize,
    pub position: Position,
    pub tx_power_dbm: f64,
    /// For a STA, the AP it is associated with; for an AP, itself.
    pub access_point: usize,
}

/// Parameters of a device drop that are not part of the layout itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropGeometry {
    /// Minimum horizontal distance between a base station and any device.
    pub min_distance: f64,
}

impl Default for DropGeometry {
    fn default() -> Self {
        Self { min_distance: 35.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkLayout {
    pub sites: Vec<Position>,
    pub sectors_per_site: usize,
    pub bss: Vec<BaseStation>,
    pub isd: f64,
    /// Periodic-image displacements used for wrap-around, first ring first.
    pub wrap_vectors: Vec<Position>,
}

/// Hexagonal lattice coordinates (i, j) -> plane, with neighbours at
/// azimuths 30°, 90°, 150°, ….
fn lattice_point(isd: f64, i: i64, j: i64) -> Position {
    let a1 = Position::polar(isd, 30.0);
    let a2 = Position::polar(isd, 90.0);
    a1 * i as f64 + a2 * j as f64
}

fn hex_ring_distance(i: i64, j: i64) -> i64 {
    i.abs().max(j.abs()).max((i + j).abs())
}

/// Site centres of a `num_sites` cluster, ordered by ring then by azimuth.
fn site_grid(num_sites: usize, isd: f64) -> Result<(Vec<Position>, Option<(i64, i64)>)> {
    let (rings, translation) = match num_sites {
        1 => (0, None),
        7 => (1, Some((2, 1))),
        19 => (2, Some((3, 2))),
        n => return Err(Error::UnsupportedSites(n)),
    };
    let mut pts: Vec<(i64, f64, Position)> = Vec::new();
    for i in -rings..=rings {
        for j in -rings..=rings {
            let r = hex_ring_distance(i, j);
            if r <= rings {
                let p = lattice_point(isd, i, j);
                let az = if r == 0 { 0.0 } else { p.azimuth_deg().rem_euclid(360.0) };
                pts.push((r, az, p));
            }
        }
    }
    pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok((pts.into_iter().map(|p| p.2).collect(), translation))
}

/// Builds the sector layout. Base stations are given `antennas` elements,
/// 25 m height, 12° downtilt and 30 dBm; callers override as needed.
pub fn build_layout(num_sites: usize, isd: f64, sectors_per_site: usize) -> Result<NetworkLayout> {
    if !(isd > 0.0) {
        return Err(Error::config("layout.isd_m", "inter-site distance must be positive"));
    }
    if sectors_per_site == 0 {
        return Err(Error::config("layout.sectors_per_site", "must be at least 1"));
    }
    let (sites, translation) = site_grid(num_sites, isd)?;

    let mut bss = Vec::with_capacity(sites.len() * sectors_per_site);
    for (s, &pos) in sites.iter().enumerate() {
        for k in 0..sectors_per_site {
            bss.push(BaseStation {
                id: bss.len(),
                site: s,
                position: pos,
                sector_azimuth: 360.0 * k as f64 / sectors_per_site as f64,
                antennas: 64,
                height: 25.0,
                downtilt: 12.0,
                tx_power_dbm: 30.0,
            });
        }
    }

    let wrap_vectors = match translation {
        None => Vec::new(),
        Some((i, j)) => {
            let t = lattice_point(isd, i, j);
            let first: Vec<Position> = (0..6)
                .map(|k| rotate(t, 60.0 * k as f64))
                .collect();
            let mut all = first.clone();
            // second ring: sums of adjacent and opposite-free pairs
            for k in 0..6 {
                all.push(first[k] * 2.0);
                all.push(first[k] + first[(k + 1) % 6]);
            }
            all
        }
    };

    Ok(NetworkLayout {
        sites,
        sectors_per_site,
        bss,
        isd,
        wrap_vectors,
    })
}

fn rotate(p: Position, deg: f64) -> Position {
    let (s, c) = deg.to_radians().sin_cos();
    Position::new(c * p.x - s * p.y, s * p.x + c * p.y)
}

impl NetworkLayout {
    pub fn num_bss(&self) -> usize {
        self.bss.len()
    }

    /// Sets the antenna count of every base station.
    pub fn with_antennas(mut self, n: usize) -> Self {
        for bs in &mut self.bss {
            bs.antennas = n;
        }
        self
    }

    /// Shortest displacement from `a` to any periodic image of `b`.
    pub fn wrap_displacement(&self, a: Position, b: Position) -> Position {
        let mut best = b - a;
        let mut best_d2 = best.dot(best);
        for &w in &self.wrap_vectors {
            let d = b + w - a;
            let d2 = d.dot(d);
            if d2 < best_d2 {
                best = d;
                best_d2 = d2;
            }
        }
        best
    }

    /// Circumradius of a site hexagon.
    pub fn cell_radius(&self) -> f64 {
        self.isd / 3f64.sqrt()
    }

    /// Whether `p` lies in the wedge and hexagon of sector base station `bs`.
    pub fn sector_contains(&self, bs: usize, p: Position) -> bool {
        let b = &self.bss[bs];
        let rel = p - b.position;
        let half_isd = self.isd / 2.0 + 1e-9;
        let in_hex = [30.0f64, 90.0, 150.0]
            .iter()
            .all(|&az| rel.dot(Position::polar(1.0, az)).abs() <= half_isd);
        if !in_hex {
            return false;
        }
        if rel.norm() == 0.0 {
            return true;
        }
        let half_width = 180.0 / self.sectors_per_site as f64 + 1e-9;
        wrap_angle_deg(rel.azimuth_deg() - b.sector_azimuth).abs() <= half_width
    }

    /// Uniform point in the sector rhombus of `bs` at least `min_distance`
    /// from the site.
    fn sample_in_sector<R: Rng + ?Sized>(&self, bs: usize, min_distance: f64, rng: &mut R) -> Position {
        let b = &self.bss[bs];
        let r = self.cell_radius();
        let half = 180.0 / self.sectors_per_site as f64;
        // for three sectors the wedge is exactly a rhombus spanned by two
        // hexagon vertices; otherwise fall back to rejection in the hexagon
        if self.sectors_per_site == 3 {
            let e1 = Position::polar(r, b.sector_azimuth - half);
            let e2 = Position::polar(r, b.sector_azimuth + half);
            loop {
                let u: f64 = rng.random();
                let v: f64 = rng.random();
                let rel = e1 * u + e2 * v;
                if rel.norm() >= min_distance {
                    return b.position + rel;
                }
            }
        }
        loop {
            let rel = Position::new(rng.random_range(-r..r), rng.random_range(-r..r));
            let p = b.position + rel;
            if rel.norm() >= min_distance && self.sector_contains(bs, p) {
                return p;
            }
        }
    }
}

/// Wraps an angle in degrees to (-180, 180].
pub fn wrap_angle_deg(a: f64) -> f64 {
    let mut x = a.rem_euclid(360.0);
    if x > 180.0 {
        x -= 360.0;
    }
    x
}

/// Minimum distance between `a` and every periodic image of `b`.
pub fn wrap_distance(layout: &NetworkLayout, a: Position, b: Position) -> f64 {
    layout.wrap_displacement(a, b).norm()
}

/// Drops UEs with a Poisson count of mean `mean_per_sector` in every sector.
pub fn drop_ues<R: Rng + ?Sized>(
    layout: &NetworkLayout,
    mean_per_sector: f64,
    geometry: DropGeometry,
    rng: &mut R,
) -> Result<Vec<UserEquipment>> {
    if !(mean_per_sector > 0.0) {
        return Err(Error::config("layout.ues_per_sector", "mean must be positive"));
    }
    let poisson = Poisson::new(mean_per_sector)
        .map_err(|e| Error::config("layout.ues_per_sector", e.to_string()))?;
    let mut ues = Vec::new();
    for bs in 0..layout.num_bss() {
        let count = poisson.sample(rng) as usize;
        for _ in 0..count {
            let position = layout.sample_in_sector(bs, geometry.min_distance, rng);
            ues.push(UserEquipment {
                id: ues.len(),
                position,
                dropped_in: bs,
                serving_bs: None,
            });
        }
    }
    Ok(ues)
}

/// Transmit powers and cluster composition of the Wi-Fi deployment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WiFiProfile {
    pub devices_per_cluster: usize,
    pub ap_power_dbm: f64,
    pub sta_power_dbm: f64,
}

impl Default for WiFiProfile {
    fn default() -> Self {
        Self {
            devices_per_cluster: 8,
            ap_power_dbm: 24.0,
            sta_power_dbm: 18.0,
        }
    }
}

/// Drops `clusters_per_sector` hotspots in every sector. Each hotspot holds
/// one AP followed by STAs, all uniform in a disc of `radius` around a centre
/// that is uniform in the sector. STAs attach to the nearest AP, which is the
/// AP with the largest average received power since every AP transmits with
/// the same power over a distance-monotone path loss.
pub fn drop_wifi<R: Rng + ?Sized>(
    layout: &NetworkLayout,
    clusters_per_sector: usize,
    radius: f64,
    profile: WiFiProfile,
    geometry: DropGeometry,
    rng: &mut R,
) -> Result<Vec<WiFiDevice>> {
    if radius < 0.0 || !radius.is_finite() {
        return Err(Error::config("layout.wifi_cluster_radius_m", "radius must be non-negative"));
    }
    if profile.devices_per_cluster == 0 {
        return Err(Error::config("wifi.devices_per_cluster", "must be at least 1"));
    }
    let mut devices: Vec<WiFiDevice> = Vec::new();
    let mut cluster = 0;
    for bs in 0..layout.num_bss() {
        let site = layout.bss[bs].position;
        for _ in 0..clusters_per_sector {
            let center = layout.sample_in_sector(bs, geometry.min_distance, rng);
            for m in 0..profile.devices_per_cluster {
                let position = loop {
                    let rho = radius * rng.random::<f64>().sqrt();
                    let phi = 2.0 * PI * rng.random::<f64>();
                    let p = center + Position::new(rho * phi.cos(), rho * phi.sin());
                    // a cluster hugging the minimum distance may have no
                    // admissible member positions when the radius is zero
                    if (p - site).norm() >= geometry.min_distance || radius == 0.0 {
                        break p;
                    }
                };
                let (kind, power) = if m == 0 {
                    (WiFiKind::Ap, profile.ap_power_dbm)
                } else {
                    (WiFiKind::Sta, profile.sta_power_dbm)
                };
                let id = devices.len();
                devices.push(WiFiDevice {
                    id,
                    kind,
                    cluster,
                    sector: bs,
                    position,
                    tx_power_dbm: power,
                    access_point: id,
                });
            }
            cluster += 1;
        }
    }

    let aps: Vec<(usize, Position)> = devices
        .iter()
        .filter(|d| d.kind == WiFiKind::Ap)
        .map(|d| (d.id, d.position))
        .collect();
    for d in devices.iter_mut().filter(|d| d.kind == WiFiKind::Sta) {
        let mut best = (f64::INFINITY, usize::MAX);
        for &(ap, pos) in &aps {
            let dist = wrap_distance(layout, d.position, pos);
            if dist < best.0 {
                best = (dist, ap);
            }
        }
        d.access_point = best.1;
    }
    Ok(devices)
}

/// Serving base station of every UE: the argmax of the slow fading gain,
/// lowest base station id on ties. `gain(bs, ue)` returns the linear gain.
pub fn associate_ues<F>(ues: &mut [UserEquipment], num_bss: usize, gain: F) -> Vec<usize>
where
    F: Fn(usize, usize) -> f64,
{
    ues.iter_mut()
        .map(|ue| {
            let mut best = 0;
            let mut best_gain = f64::NEG_INFINITY;
            for bs in 0..num_bss {
                let g = gain(bs, ue.id);
                if g > best_gain {
                    best_gain = g;
                    best = bs;
                }
            }
            ue.serving_bs = Some(best);
            best
        })
        .collect()
}
