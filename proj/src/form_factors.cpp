#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "trdiff/errors.hpp"
#include "trdiff/graphene.hpp"

namespace trdiff::graphene {

namespace {

constexpr std::complex<double> I(0.0, 1.0);

double max_spacing(const CellGrid& grid) { return std::max(grid.a1.norm(), grid.a2.norm()) / grid.n; }

void check_resolution(const OrbitalProfile& orbital, const CellGrid& grid) {
  if (!(orbital.width > 0) || !(orbital.cutoff > 0))
    throw DomainError("graphene_model", "orbital profile needs positive width and cutoff");
  if (max_spacing(grid) > 0.5 * orbital.width)
    throw DomainError("graphene_model", "cell grid spacing " + std::to_string(max_spacing(grid)) +
                                            " too coarse for orbital width " + std::to_string(orbital.width) +
                                            " (need spacing <= width/2)");
}

}  // namespace

OrbitalProfile gaussian_orbital(double width) {
  if (!(width > 0)) throw DomainError("graphene_model", "orbital width must be positive");
  const double norm = 1.0 / (std::sqrt(std::numbers::pi) * width);
  const double inv2w2 = 0.5 / (width * width);
  OrbitalProfile o;
  o.value = [=](const Vector2d& r) { return norm * std::exp(-r.squaredNorm() * inv2w2); };
  o.gradient = [=](const Vector2d& r) -> Vector2d {
    return (-2.0 * inv2w2 * norm * std::exp(-r.squaredNorm() * inv2w2)) * r;
  };
  o.width = width;
  // exp(-r^2/2w^2) < 1e-18
  o.cutoff = width * std::sqrt(2.0 * 18.0 * std::log(10.0));
  return o;
}

CellGrid make_cell_grid(const Lattice& lat, int n, int halo, const Vector2d& origin) {
  if (n < 2) throw DomainError("graphene_model", "cell grid needs n >= 2");
  if (halo < 0) throw DomainError("graphene_model", "halo must be >= 0");
  CellGrid g;
  g.n = n;
  g.halo = halo;
  g.origin = origin;
  g.a1 = lat.a1;
  g.a2 = lat.a2;
  g.weight = lat.cell_area() / (double(n) * n);
  g.points.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g.points.push_back(origin + (double(i) / n) * lat.a1 + (double(j) / n) * lat.a2);
  return g;
}

void check_nyquist(const CellGrid& grid, const Vector2d& s) {
  for (const Vector2d& axis : {grid.a1, grid.a2}) {
    const double step = std::abs(s.dot(axis)) / grid.n;
    if (step >= std::numbers::pi)
      throw DomainError("graphene_model", "Bragg vector not resolved by cell grid: need n > " +
                                              std::to_string(std::abs(s.dot(axis)) / std::numbers::pi));
  }
}

BlochSampler::BlochSampler(const Lattice& lat, const OrbitalProfile& orbital, const CellGrid& grid)
    : lattice_(lat), grid_(grid) {
  check_resolution(orbital, grid);
  const auto npts = static_cast<Eigen::Index>(grid.points.size());
  for (int m = -grid.halo; m <= grid.halo + 1; ++m) {
    for (int l = -grid.halo; l <= grid.halo + 1; ++l) {
      for (int s = 0; s < 2; ++s) {
        Image img;
        img.sublattice = s;
        img.site = m * lat.a1 + l * lat.a2 + lat.sublattice(s);
        img.value.resize(npts);
        img.grad_x.resize(npts);
        img.grad_y.resize(npts);
        double peak = 0;
        for (Eigen::Index i = 0; i < npts; ++i) {
          const Vector2d r = grid.points[static_cast<std::size_t>(i)] - img.site;
          if (r.norm() > orbital.cutoff) {
            img.value(i) = img.grad_x(i) = img.grad_y(i) = 0.0;
            continue;
          }
          img.value(i) = orbital.value(r);
          const Vector2d g = orbital.gradient(r);
          img.grad_x(i) = g.x();
          img.grad_y(i) = g.y();
          peak = std::max(peak, std::abs(img.value(i)));
        }
        if (peak > 0) images_.push_back(std::move(img));
      }
    }
  }
}

BlochSampler::Sums BlochSampler::sample(const Vector2d& p) const {
  const auto npts = static_cast<Eigen::Index>(grid_.points.size());
  Sums out;
  for (int s = 0; s < 2; ++s) {
    out.chi[static_cast<std::size_t>(s)] = Eigen::VectorXcd::Zero(npts);
    out.dx[static_cast<std::size_t>(s)] = Eigen::VectorXcd::Zero(npts);
    out.dy[static_cast<std::size_t>(s)] = Eigen::VectorXcd::Zero(npts);
  }
  for (const Image& img : images_) {
    const std::complex<double> phase = std::polar(1.0, p.dot(img.site));
    const auto s = static_cast<std::size_t>(img.sublattice);
    out.chi[s] += phase * img.value.cast<std::complex<double>>();
    out.dx[s] += phase * img.grad_x.cast<std::complex<double>>();
    out.dy[s] += phase * img.grad_y.cast<std::complex<double>>();
  }
  return out;
}

CellFields cell_matrix_elements(const BlochSampler& sampler, const BandState& state) {
  const BlochSampler::Sums sums = sampler.sample(state.p);
  const double w = sampler.grid().weight;

  std::array<Eigen::VectorXcd, 2> psi, dpsi_x, dpsi_y;
  for (int n = 0; n < 2; ++n) {
    const Vector2cd& c = state.evec(n);
    auto& v = psi[static_cast<std::size_t>(n)];
    v = c(0) * sums.chi[0] + c(1) * sums.chi[1];
    const double norm = std::sqrt(v.squaredNorm() * w);
    v /= norm;
    dpsi_x[static_cast<std::size_t>(n)] = (c(0) * sums.dx[0] + c(1) * sums.dx[1]) / norm;
    dpsi_y[static_cast<std::size_t>(n)] = (c(0) * sums.dy[0] + c(1) * sums.dy[1]) / norm;
  }

  CellFields fields;
  for (int f = 0; f < 2; ++f) {
    for (int n = 0; n < 2; ++n) {
      const auto idx = static_cast<std::size_t>(2 * f + n);
      const auto& pf = psi[static_cast<std::size_t>(f)];
      const auto& pn = psi[static_cast<std::size_t>(n)];
      fields.q[idx] = pf.conjugate().cwiseProduct(pn);
      fields.jx[idx] = (pf.conjugate().cwiseProduct(dpsi_x[static_cast<std::size_t>(n)]) -
                        dpsi_x[static_cast<std::size_t>(f)].conjugate().cwiseProduct(pn)) /
                       (2.0 * I);
      fields.jy[idx] = (pf.conjugate().cwiseProduct(dpsi_y[static_cast<std::size_t>(n)]) -
                        dpsi_y[static_cast<std::size_t>(f)].conjugate().cwiseProduct(pn)) /
                       (2.0 * I);
    }
  }
  return fields;
}

CellFields cell_matrix_elements(const Lattice& lat, const BandState& state, const OrbitalProfile& orbital,
                                const CellGrid& grid) {
  return cell_matrix_elements(BlochSampler(lat, orbital, grid), state);
}

Vector2d bragg_vector(const Lattice& lat, int h, int k) {
  if (h == 0 && k == 0) throw DomainError("graphene_model", "bragg_vector: [0,0] is not a Bragg spot");
  return h * lat.b1 + k * lat.b2;
}

std::string Spot::label() const { return std::to_string(h) + "_" + std::to_string(k); }

Spot make_spot(const Lattice& lat, int h, int k) { return Spot{h, k, bragg_vector(lat, h, k)}; }

std::complex<double> fourier_at_bragg(const CellGrid& grid, const Eigen::VectorXcd& field, const Vector2d& s) {
  check_nyquist(grid, s);
  if (field.size() != static_cast<Eigen::Index>(grid.points.size()))
    throw DomainError("graphene_model", "fourier_at_bragg: field size does not match grid");
  std::complex<double> total(0);
  for (std::size_t i = 0; i < grid.points.size(); ++i)
    total += field(static_cast<Eigen::Index>(i)) * std::polar(1.0, -s.dot(grid.points[i]));
  return total * grid.weight;
}

FormFactorEvaluator::FormFactorEvaluator(const Lattice& lat, double t_hop, const OrbitalProfile& orbital,
                                         const CellGrid& grid, const Vector2d& s)
    : lattice_(lat), t_hop_(t_hop), s_(s) {
  check_resolution(orbital, grid);
  check_nyquist(grid, s);

  // Exponentials on the cell grid; exp(-i S.R) = 1 for every lattice vector R,
  // so folding images back into the cell leaves the phase unchanged.
  std::vector<std::complex<double>> phase(grid.points.size());
  for (std::size_t i = 0; i < grid.points.size(); ++i) phase[i] = std::polar(1.0, -s.dot(grid.points[i]));

  const int pair_range = grid.halo + 1;
  const int fold_range = grid.halo + 2;
  for (int s1 = 0; s1 < 2; ++s1) {
    for (int s2 = 0; s2 < 2; ++s2) {
      for (int m = -pair_range; m <= pair_range; ++m) {
        for (int l = -pair_range; l <= pair_range; ++l) {
          const Vector2d centre1 = lat.sublattice(s1);
          const Vector2d centre2 = m * lat.a1 + l * lat.a2 + lat.sublattice(s2);
          if ((centre2 - centre1).norm() > 2.0 * orbital.cutoff) continue;

          PairTerm term;
          term.s = s1;
          term.s2 = s2;
          term.displacement = centre2 - centre1;
          for (int fm = -fold_range; fm <= fold_range; ++fm) {
            for (int fl = -fold_range; fl <= fold_range; ++fl) {
              const Vector2d shift = fm * lat.a1 + fl * lat.a2;
              for (std::size_t i = 0; i < grid.points.size(); ++i) {
                const Vector2d x = grid.points[i] + shift;
                const Vector2d r1 = x - centre1, r2 = x - centre2;
                if (r1.norm() > orbital.cutoff || r2.norm() > orbital.cutoff) continue;
                const double v1 = orbital.value(r1), v2 = orbital.value(r2);
                const Vector2d g1 = orbital.gradient(r1), g2 = orbital.gradient(r2);
                const double prod = v1 * v2;
                // (1/2i)(phi1 d phi2 - d phi1 phi2) for real orbitals
                const std::complex<double> cx = (v1 * g2.x() - g1.x() * v2) / (2.0 * I);
                const std::complex<double> cy = (v1 * g2.y() - g1.y() * v2) / (2.0 * I);
                term.q += prod * phase[i];
                term.jx += cx * phase[i];
                term.jy += cy * phase[i];
                term.norm += prod;
              }
            }
          }
          term.q *= grid.weight;
          term.jx *= grid.weight;
          term.jy *= grid.weight;
          term.norm *= grid.weight;
          terms_.push_back(term);
        }
      }
    }
  }
}

BandFormFactors FormFactorEvaluator::at(const BandState& state) const {
  Matrix2cd raw_q = Matrix2cd::Zero(), raw_x = Matrix2cd::Zero(), raw_y = Matrix2cd::Zero(),
            raw_n = Matrix2cd::Zero();
  for (const PairTerm& t : terms_) {
    const std::complex<double> ph = std::polar(1.0, state.p.dot(t.displacement));
    raw_q(t.s, t.s2) += ph * t.q;
    raw_x(t.s, t.s2) += ph * t.jx;
    raw_y(t.s, t.s2) += ph * t.jy;
    raw_n(t.s, t.s2) += ph * t.norm;
  }
  const Matrix2cd u = state.basis();
  const Eigen::Vector2d norms = (u.adjoint() * raw_n * u).diagonal().real();
  Eigen::Matrix2d scale;
  for (int f = 0; f < 2; ++f)
    for (int n = 0; n < 2; ++n) scale(f, n) = 1.0 / std::sqrt(norms(f) * norms(n));

  BandFormFactors out;
  out.q = (u.adjoint() * raw_q * u).cwiseProduct(scale.cast<std::complex<double>>());
  out.jx = (u.adjoint() * raw_x * u).cwiseProduct(scale.cast<std::complex<double>>());
  out.jy = (u.adjoint() * raw_y * u).cwiseProduct(scale.cast<std::complex<double>>());
  return out;
}

FormFactorTable build_form_factor_table(const Lattice& lat, double t_hop, const KGrid& kgrid,
                                        const std::vector<Spot>& spots, const OrbitalProfile& orbital,
                                        const CellGrid& grid, const Vector2d& shift) {
  FormFactorTable table;
  table.spots = spots;
  table.kpoints = kgrid.points;
  for (const Spot& spot : spots) {
    const FormFactorEvaluator eval(lat, t_hop, orbital, grid, spot.s);
    std::vector<BandFormFactors> row;
    row.reserve(kgrid.points.size());
    for (const Vector2d& p : kgrid.points) row.push_back(eval.at(p + shift));
    table.entries.push_back(std::move(row));
  }
  return table;
}

void write_form_factor_csv(const std::filesystem::path& path, const FormFactorTable& table,
                           const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw DomainError("graphene_model", "cannot write " + path.string());
  out << header_comment << "spot,component,f,n,kx,ky,re,im\n";
  char buf[160];
  for (std::size_t s = 0; s < table.spots.size(); ++s) {
    for (const char* comp : {"Q", "Jx", "Jy"}) {
      for (std::size_t k = 0; k < table.kpoints.size(); ++k) {
        const BandFormFactors& e = table.entries[s][k];
        const Matrix2cd& m = comp[0] == 'Q' ? e.q : (comp[1] == 'x' ? e.jx : e.jy);
        for (int f = 0; f < 2; ++f) {
          for (int n = 0; n < 2; ++n) {
            std::snprintf(buf, sizeof buf, ",%d,%d,%.16e,%.16e,%.16e,%.16e\n", f, n, table.kpoints[k].x(),
                          table.kpoints[k].y(), m(f, n).real(), m(f, n).imag());
            out << table.spots[s].label() << ',' << comp << buf;
          }
        }
      }
    }
  }
}

}  // namespace trdiff::graphene
