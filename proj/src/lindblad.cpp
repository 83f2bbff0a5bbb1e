#include "qswitch/lindblad.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>

#include "qswitch/diagnostics.hpp"
#include "qswitch/errors.hpp"
#include "qswitch/units.hpp"

namespace qswitch {

const std::vector<double>& Trajectory::series(std::string_view label) const {
  for (std::size_t k = 0; k < labels.size(); ++k)
    if (labels[k] == label) return values[k];
  throw std::out_of_range("trajectory has no series '" + std::string(label) + "'");
}

bool Trajectory::has(std::string_view label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

DensityMatrix dissipator(const Operator& x, const DensityMatrix& rho) {
  require_same_layout(x.layout(), rho.layout(), "dissipator");
  const SparseMatrix& X = x.matrix();
  const SparseMatrix Xd = X.adjoint();
  const SparseMatrix XdX = Xd * X;
  const SparseMatrix& r = rho.matrix();
  SparseMatrix out = 2.0 * SparseMatrix(X * r * Xd) - SparseMatrix(XdX * r) - SparseMatrix(r * XdX);
  out.prune(cplx(0.0), 0.0);
  return DensityMatrix(rho.layout_ptr(), std::move(out));
}

DensityMatrix lindblad_rhs(const Operator& hamiltonian, std::span<const CollapseTerm> collapses, const DensityMatrix& rho) {
  require_same_layout(hamiltonian.layout(), rho.layout(), "lindblad_rhs");
  const SparseMatrix& H = hamiltonian.matrix();
  const SparseMatrix& r = rho.matrix();
  SparseMatrix out = cplx(0.0, -1.0) * SparseMatrix(SparseMatrix(H * r) - SparseMatrix(r * H));
  for (const auto& c : collapses) out += angular(c.rate_ghz) * dissipator(c.op, rho).matrix();
  out.prune(cplx(0.0), 0.0);
  return DensityMatrix(rho.layout_ptr(), std::move(out));
}

std::vector<double> uniform_grid(double t_final_ns, double step_ns) {
  if (!(t_final_ns >= 0.0)) throw std::invalid_argument("t_final must be non-negative");
  std::vector<double> grid{0.0};
  if (t_final_ns == 0.0) return grid;
  if (!(step_ns > 0.0)) throw std::invalid_argument("sample step must be positive");
  const auto n = static_cast<long>(std::floor(t_final_ns / step_ns + 1e-9));
  for (long k = 1; k <= n; ++k) grid.push_back(std::min(t_final_ns, static_cast<double>(k) * step_ns));
  if (t_final_ns - grid.back() > 1e-9 * t_final_ns) grid.push_back(t_final_ns);
  grid.back() = t_final_ns;
  return grid;
}

std::vector<std::size_t> closed_support(std::span<const std::size_t> seed, std::span<const SparseMatrix* const> ops) {
  using ColMajor = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;
  std::vector<ColMajor> cols;
  std::size_t dim = 0;
  for (const SparseMatrix* op : ops) {
    cols.emplace_back(*op);
    dim = static_cast<std::size_t>(op->rows());
  }
  if (ops.empty()) return {seed.begin(), seed.end()};
  std::vector<char> seen(dim, 0);
  std::deque<std::size_t> queue;
  for (std::size_t s : seed)
    if (!seen[s]) {
      seen[s] = 1;
      queue.push_back(s);
    }
  while (!queue.empty()) {
    const auto j = static_cast<int>(queue.front());
    queue.pop_front();
    for (const auto& m : cols)
      for (ColMajor::InnerIterator it(m, j); it; ++it) {
        if (it.value() == cplx(0.0)) continue;
        const auto i = static_cast<std::size_t>(it.row());
        if (!seen[i]) {
          seen[i] = 1;
          queue.push_back(i);
        }
      }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dim; ++i)
    if (seen[i]) out.push_back(i);
  return out;
}

namespace {

struct Csr {
  std::size_t rows = 0;
  std::vector<int> ptr{0};
  std::vector<int> idx;
  std::vector<cplx> val;

  kernels::CsrView view() const { return {rows, rows, ptr.data(), idx.data(), val.data()}; }
};

// Restriction of a layout-wide matrix to the basis subset `basis`.
Csr restrict_to(const SparseMatrix& m, const std::vector<std::size_t>& basis, const std::vector<int>& slot) {
  Csr out;
  out.rows = basis.size();
  for (std::size_t r = 0; r < basis.size(); ++r) {
    std::vector<std::pair<int, cplx>> row;
    for (SparseMatrix::InnerIterator it(m, static_cast<int>(basis[r])); it; ++it) {
      if (it.value() == cplx(0.0)) continue;
      const int c = slot[static_cast<std::size_t>(it.col())];
      if (c >= 0) row.emplace_back(c, it.value());
    }
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [c, v] : row) {
      out.idx.push_back(c);
      out.val.push_back(v);
    }
    out.ptr.push_back(static_cast<int>(out.idx.size()));
  }
  return out;
}

struct Frame {
  std::string name = "none";
  std::vector<double> energy;  // H0 diagonal on the reduced basis, empty if no frame
};

// Integer excitation counts per group for each reduced basis state.
std::vector<std::vector<int>> group_counts(const SpaceLayout& layout, const std::vector<std::size_t>& basis, bool split) {
  const std::size_t groups = split ? 2 : 1;
  std::vector<std::vector<int>> counts(basis.size(), std::vector<int>(groups, 0));
  for (std::size_t r = 0; r < basis.size(); ++r)
    for (std::size_t p = 0; p < layout.size(); ++p) {
      const std::size_t g = split && layout.subsystems()[p].kind != SubsystemKind::boson ? 1 : 0;
      counts[r][g] += layout.digit(basis[r], p);
    }
  return counts;
}

bool conserves(const Csr& m, const std::vector<std::vector<int>>& n) {
  for (std::size_t r = 0; r < m.rows; ++r)
    for (int k = m.ptr[r]; k < m.ptr[r + 1]; ++k)
      if (n[r] != n[static_cast<std::size_t>(m.idx[k])]) return false;
  return true;
}

bool shifts_uniformly(const Csr& m, const std::vector<std::vector<int>>& n) {
  std::optional<std::vector<int>> shift;
  for (std::size_t r = 0; r < m.rows; ++r)
    for (int k = m.ptr[r]; k < m.ptr[r + 1]; ++k) {
      const auto& to = n[r];
      const auto& from = n[static_cast<std::size_t>(m.idx[k])];
      std::vector<int> d(to.size());
      for (std::size_t g = 0; g < d.size(); ++g) d[g] = to[g] - from[g];
      if (!shift) shift = d;
      else if (*shift != d) return false;
    }
  return true;
}

Frame choose_frame(const SpaceLayout& layout, const std::vector<std::size_t>& basis, const Csr& h,
                   const std::vector<Csr>& jumps) {
  for (bool split : {true, false}) {
    const auto n = group_counts(layout, basis, split);
    if (!conserves(h, n)) continue;
    if (!std::all_of(jumps.begin(), jumps.end(), [&](const Csr& x) { return shifts_uniformly(x, n); })) continue;
    const std::size_t groups = n.front().size();
    Eigen::MatrixXd a(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(groups + 1));
    Eigen::VectorXd b(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t r = 0; r < basis.size(); ++r) {
      const auto row = static_cast<Eigen::Index>(r);
      a(row, 0) = 1.0;
      for (std::size_t g = 0; g < groups; ++g) a(row, static_cast<Eigen::Index>(g + 1)) = n[r][g];
      double diag = 0.0;
      for (int k = h.ptr[r]; k < h.ptr[r + 1]; ++k)
        if (static_cast<std::size_t>(h.idx[k]) == r) diag = h.val[k].real();
      b(row) = diag;
    }
    const Eigen::VectorXd w = a.colPivHouseholderQr().solve(b);
    Frame f;
    f.name = split ? "grouped" : "total";
    f.energy.resize(basis.size());
    for (std::size_t r = 0; r < basis.size(); ++r) {
      double e = 0.0;
      for (std::size_t g = 0; g < groups; ++g) e += w(static_cast<Eigen::Index>(g + 1)) * n[r][g];
      f.energy[r] = e;
    }
    return f;
  }
  return {};
}

bool commutes_with_frame(const Csr& m, const Frame& frame) {
  if (frame.energy.empty()) return true;
  for (std::size_t r = 0; r < m.rows; ++r)
    for (int k = m.ptr[r]; k < m.ptr[r + 1]; ++k)
      if (frame.energy[r] != frame.energy[static_cast<std::size_t>(m.idx[k])]) return false;
  return true;
}

struct Problem {
  std::size_t dim = 0;
  Csr heff;
  std::vector<Csr> jumps;
  std::vector<cplx> jump_weight;
  std::vector<Csr> observables;
  std::vector<bool> observable_in_frame;
  Frame frame;
  std::vector<std::pair<std::string, std::vector<std::size_t>>> top_levels;  // mode -> reduced slots at its top level
};

class Integrator {
 public:
  Integrator(const Problem& p, const kernels::KernelTable& k)
      : p_(p), k_(k), n2_(p.dim * p.dim), k1_(n2_), k2_(n2_), k3_(n2_), k4_(n2_), tmp_(n2_), m_(n2_), a_(n2_) {}

  void rhs(const cplx* rho, cplx* out) {
    const std::size_t d = p_.dim;
    k_.csr_times_dense(p_.heff.view(), rho, m_.data(), d);
    k_.anti_hermitian_part(m_.data(), out, d);
    for (std::size_t j = 0; j < p_.jumps.size(); ++j) {
      k_.csr_times_dense(p_.jumps[j].view(), rho, m_.data(), d);
      k_.adjoint(m_.data(), a_.data(), d);
      k_.csr_times_dense(p_.jumps[j].view(), a_.data(), m_.data(), d);
      k_.axpy(p_.jump_weight[j], m_.data(), out, n2_);
    }
  }

  void step(std::vector<cplx>& rho, double h) {
    rhs(rho.data(), k1_.data());
    k_.axpby(rho.data(), cplx(0.5 * h), k1_.data(), tmp_.data(), n2_);
    rhs(tmp_.data(), k2_.data());
    k_.axpby(rho.data(), cplx(0.5 * h), k2_.data(), tmp_.data(), n2_);
    rhs(tmp_.data(), k3_.data());
    k_.axpby(rho.data(), cplx(h), k3_.data(), tmp_.data(), n2_);
    rhs(tmp_.data(), k4_.data());
    k_.axpy(cplx(h / 6.0), k1_.data(), rho.data(), n2_);
    k_.axpy(cplx(h / 3.0), k2_.data(), rho.data(), n2_);
    k_.axpy(cplx(h / 3.0), k3_.data(), rho.data(), n2_);
    k_.axpy(cplx(h / 6.0), k4_.data(), rho.data(), n2_);
    symmetrize(rho);
  }

 private:
  void symmetrize(std::vector<cplx>& rho) const {
    const std::size_t d = p_.dim;
    for (std::size_t i = 0; i < d; ++i) {
      rho[i * d + i] = cplx(rho[i * d + i].real(), 0.0);
      for (std::size_t j = i + 1; j < d; ++j) {
        const cplx avg = 0.5 * (rho[i * d + j] + std::conj(rho[j * d + i]));
        rho[i * d + j] = avg;
        rho[j * d + i] = std::conj(avg);
      }
    }
  }

  const Problem& p_;
  const kernels::KernelTable& k_;
  std::size_t n2_;
  std::vector<cplx> k1_, k2_, k3_, k4_, tmp_, m_, a_;
};

// Lab-frame element rho_ij at time t from the rotating-frame buffer.
cplx lab_element(const Problem& p, const std::vector<cplx>& rho, std::size_t i, std::size_t j, double t) {
  const cplx v = rho[i * p.dim + j];
  if (p.frame.energy.empty()) return v;
  const double phase = -(p.frame.energy[i] - p.frame.energy[j]) * t;
  return v * std::exp(cplx(0.0, phase));
}

double observe(const Problem& p, std::size_t k, const std::vector<cplx>& rho, double t) {
  const Csr& a = p.observables[k];
  cplx sum = 0.0;
  const bool direct = p.observable_in_frame[k];
  for (std::size_t i = 0; i < a.rows; ++i)
    for (int e = a.ptr[i]; e < a.ptr[i + 1]; ++e) {
      const auto j = static_cast<std::size_t>(a.idx[e]);
      sum += a.val[e] * (direct ? rho[j * p.dim + i] : lab_element(p, rho, j, i, t));
    }
  return sum.real();
}

double min_eigenvalue(const std::vector<cplx>& rho, std::size_t d) {
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMat> m(rho.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

struct RunOutput {
  Trajectory traj;
  std::vector<cplx> final_rho;
};

RunOutput run(const Problem& p, const std::vector<cplx>& rho0, std::span<const double> grid, double dt,
              const IntegratorSettings& settings, const kernels::KernelTable& kern, bool report_truncation) {
  RunOutput out;
  Trajectory& tr = out.traj;
  tr.values.assign(p.observables.size(), {});
  std::vector<cplx> rho = rho0;
  Integrator integ(p, kern);
  std::set<std::string> warned;
  long substeps_total = 0;

  auto record = [&](std::size_t index, double t) {
    tr.times.push_back(t);
    for (std::size_t k = 0; k < p.observables.size(); ++k) tr.values[k].push_back(observe(p, k, rho, t));
    double trace = 0.0;
    for (std::size_t i = 0; i < p.dim; ++i) trace += rho[i * p.dim + i].real();
    tr.trace.push_back(trace);
    const bool eig = settings.min_eig_every > 0 && index % static_cast<std::size_t>(settings.min_eig_every) == 0;
    tr.min_eig.push_back(eig ? min_eigenvalue(rho, p.dim) : std::numeric_limits<double>::quiet_NaN());
    if (!report_truncation) return;
    for (const auto& [label, slots] : p.top_levels) {
      double pop = 0.0;
      for (std::size_t s : slots) pop += rho[s * p.dim + s].real();
      if (pop > kTruncationWarningThreshold && warned.insert(label).second) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "truncation: top Fock level of '%s' holds %.3g at t = %.6g ns", label.c_str(),
                      pop, t);
        tr.warnings.emplace_back(buf);
        warn(buf);
      }
    }
  };

  record(0, grid[0]);
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double span = grid[g] - grid[g - 1];
    const auto n = std::max<long>(1, static_cast<long>(std::ceil(span / dt - 1e-9)));
    const double h = span / static_cast<double>(n);
    for (long s = 0; s < n; ++s) integ.step(rho, h);
    substeps_total += n;
    record(g, grid[g]);
  }
  tr.metadata["substeps"] = std::to_string(substeps_total);
  out.final_rho = std::move(rho);
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

Trajectory integrate(const Operator& hamiltonian, std::span<const CollapseTerm> collapses, const DensityMatrix& rho0,
                     std::span<const double> t_grid, std::span<const Observable> observables, IntegratorSettings settings) {
  const SpaceLayout& layout = hamiltonian.layout();
  require_same_layout(layout, rho0.layout(), "integrate");
  for (const auto& c : collapses) {
    require_same_layout(layout, c.op.layout(), "integrate collapse '" + c.label + "'");
    if (!(c.rate_ghz >= 0.0)) throw std::invalid_argument("collapse '" + c.label + "' has a negative rate");
  }
  for (const auto& o : observables) require_same_layout(layout, o.op.layout(), "integrate observable '" + o.label + "'");
  if (hamiltonian.hermiticity_deviation() > 1e-8) throw std::invalid_argument("integrate: hamiltonian is not hermitian");
  if (t_grid.empty() || t_grid.front() != 0.0) throw std::invalid_argument("time grid must start at 0");
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] > t_grid[k - 1])) throw std::invalid_argument("time grid must be strictly increasing");
  if (!(settings.dt_ns > 0.0)) throw std::invalid_argument("dt must be positive");
  rho0.validate();

  // Basis subset closed under the generator.
  std::vector<SparseMatrix> xdx;
  for (const auto& c : collapses) xdx.push_back(SparseMatrix(c.op.matrix().adjoint() * c.op.matrix()));
  std::vector<std::size_t> basis;
  if (settings.reduce_subspace) {
    std::vector<const SparseMatrix*> ops{&hamiltonian.matrix()};
    for (std::size_t k = 0; k < collapses.size(); ++k) {
      ops.push_back(&collapses[k].op.matrix());
      ops.push_back(&xdx[k]);
    }
    const auto seed = rho0.support();
    basis = closed_support(seed, ops);
  } else {
    basis.resize(layout.total_dim());
    for (std::size_t i = 0; i < basis.size(); ++i) basis[i] = i;
  }
  std::vector<int> slot(layout.total_dim(), -1);
  for (std::size_t r = 0; r < basis.size(); ++r) slot[basis[r]] = static_cast<int>(r);

  Problem p;
  p.dim = basis.size();
  Csr h = restrict_to(hamiltonian.matrix(), basis, slot);
  for (const auto& c : collapses) p.jumps.push_back(restrict_to(c.op.matrix(), basis, slot));
  if (settings.rotating_frame) p.frame = choose_frame(layout, basis, h, p.jumps);

  // H_eff = (H - H0) - i sum rate X^dag X
  SparseMatrix heff = hamiltonian.matrix();
  for (std::size_t k = 0; k < collapses.size(); ++k) heff -= cplx(0.0, angular(collapses[k].rate_ghz)) * xdx[k];
  p.heff = restrict_to(heff, basis, slot);
  if (!p.frame.energy.empty())
    for (std::size_t r = 0; r < p.dim; ++r)
      for (int k = p.heff.ptr[r]; k < p.heff.ptr[r + 1]; ++k)
        if (static_cast<std::size_t>(p.heff.idx[k]) == r) p.heff.val[k] -= p.frame.energy[r];
  for (const auto& c : collapses) p.jump_weight.emplace_back(2.0 * angular(c.rate_ghz));
  for (const auto& o : observables) {
    p.observables.push_back(restrict_to(o.op.matrix(), basis, slot));
    p.observable_in_frame.push_back(commutes_with_frame(p.observables.back(), p.frame));
  }
  for (std::size_t pos = 0; pos < layout.size(); ++pos) {
    const Subsystem& s = layout.subsystems()[pos];
    if (s.kind == SubsystemKind::qubit) continue;
    std::vector<std::size_t> slots;
    for (std::size_t r = 0; r < p.dim; ++r)
      if (layout.digit(basis[r], pos) == s.dim - 1) slots.push_back(r);
    p.top_levels.emplace_back(s.label, std::move(slots));
  }

  std::vector<cplx> rho(p.dim * p.dim, cplx(0.0));
  for (std::size_t r = 0; r < p.dim; ++r)
    for (SparseMatrix::InnerIterator it(rho0.matrix(), static_cast<int>(basis[r])); it; ++it) {
      const int c = slot[static_cast<std::size_t>(it.col())];
      if (c >= 0) rho[r * p.dim + static_cast<std::size_t>(c)] = it.value();
    }

  const kernels::KernelTable& kern = settings.kernels ? *settings.kernels : kernels::active();
  RunOutput main = run(p, rho, t_grid, settings.dt_ns, settings, kern, true);
  Trajectory& tr = main.traj;

  double worst = 0.0;
  if (settings.check_convergence && t_grid.size() > 1) {
    IntegratorSettings fine = settings;
    fine.min_eig_every = 0;
    const RunOutput check = run(p, rho, t_grid, 0.5 * settings.dt_ns, fine, kern, false);
    auto compare = [&](double coarse, double precise, const std::string& what) {
      const double diff = std::abs(coarse - precise);
      const double allowed = settings.convergence_rtol * std::abs(precise) + settings.convergence_atol;
      worst = std::max(worst, diff / allowed);
      if (diff > allowed)
        throw NumericalError("step-size convergence failure on '" + what + "': dt gives " + fmt(coarse) + ", dt/2 gives " +
                             fmt(precise));
    };
    for (std::size_t k = 0; k < observables.size(); ++k)
      compare(tr.values[k].back(), check.traj.values[k].back(), observables[k].label);
    compare(tr.trace.back(), check.traj.trace.back(), "trace");
  }

  tr.labels.clear();
  for (const auto& o : observables) tr.labels.push_back(o.label);
  tr.metadata["method"] = "rk4";
  tr.metadata["dt_ns"] = fmt(settings.dt_ns);
  tr.metadata["full_dim"] = std::to_string(layout.total_dim());
  tr.metadata["reduced_dim"] = std::to_string(p.dim);
  tr.metadata["frame"] = p.frame.name;
  tr.metadata["kernels"] = std::string(kern.name);
  tr.metadata["convergence_check"] = settings.check_convergence ? "dt/2" : "off";
  if (settings.check_convergence) tr.metadata["convergence_ratio"] = fmt(worst);

  if (settings.keep_final_state) {
    const double t = t_grid.back();
    std::vector<Eigen::Triplet<cplx, int>> entries;
    for (std::size_t i = 0; i < p.dim; ++i)
      for (std::size_t j = 0; j < p.dim; ++j) {
        const cplx v = lab_element(p, main.final_rho, i, j, t);
        if (v != cplx(0.0)) entries.emplace_back(static_cast<int>(basis[i]), static_cast<int>(basis[j]), v);
      }
    const auto dim = static_cast<int>(layout.total_dim());
    SparseMatrix m(dim, dim);
    m.setFromTriplets(entries.begin(), entries.end());
    tr.final_state = DensityMatrix(rho0.layout_ptr(), std::move(m));
  }
  return std::move(tr);
}

}  // namespace qswitch
