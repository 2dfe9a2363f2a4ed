#include "kgaug/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <unordered_set>

#include "kgaug/rng.hpp"

namespace kgaug {

namespace {

void check_in_ball(double squared_norm) {
  if (!(squared_norm < 1.0)) {
    throw BallError("vector with norm " + std::to_string(std::sqrt(squared_norm)) +
                    " lies outside the open unit ball");
  }
}

// arcosh(1 + z) without the cancellation of acosh near 1
double arcosh1p(double z) { return std::log1p(z + std::sqrt(z * (z + 2.0))); }

double distance_impl(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v) {
  if (u.size() != v.size()) throw std::invalid_argument("poincare_distance: dimension mismatch");
  const double uu = u.squaredNorm();
  const double vv = v.squaredNorm();
  check_in_ball(uu);
  check_in_ball(vv);
  const double z = 2.0 * (u - v).squaredNorm() / ((1.0 - uu) * (1.0 - vv));
  return arcosh1p(z);
}

}  // namespace

double poincare_distance(std::span<const double> u, std::span<const double> v) {
  return distance_impl(Eigen::Map<const Vector>(u.data(), static_cast<Eigen::Index>(u.size())),
                       Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
}

double poincare_distance(const Vector& u, const Vector& v) { return distance_impl(u, v); }

Vector poincare_distance_grad(const Vector& u, const Vector& v) {
  const double uu = u.squaredNorm();
  const double vv = v.squaredNorm();
  check_in_ball(uu);
  check_in_ball(vv);
  const double alpha = 1.0 - uu;
  const double beta = 1.0 - vv;
  const double z = 2.0 * (u - v).squaredNorm() / (alpha * beta);
  if (z < 1e-30) return Vector::Zero(u.size());
  const double root = std::sqrt(z * (z + 2.0));  // sqrt(gamma^2 - 1)
  const double coeff = 4.0 / (beta * root);
  return coeff * (((vv - 2.0 * u.dot(v) + 1.0) / (alpha * alpha)) * u - v / alpha);
}

double riemannian_scale(double squared_norm) {
  const double t = 1.0 - squared_norm;
  return t * t / 4.0;
}

double PoincareModel::distance(NodeId a, NodeId b) const {
  return distance_impl(vectors_.row(a).transpose(), vectors_.row(b).transpose());
}

double PoincareModel::max_norm() const {
  if (vectors_.rows() == 0) return 0.0;
  return vectors_.rowwise().norm().maxCoeff();
}

void TrainConfig::validate() const {
  if (dim == 0) throw std::invalid_argument("dim must be positive");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (epochs == 0) throw std::invalid_argument("epochs must be positive");
  if (neg_count == 0) throw std::invalid_argument("neg_count must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (!(ball_margin > 0.0 && ball_margin <= 1e-3)) {
    throw std::invalid_argument("ball_margin must lie in (0, 1e-3]");
  }
}

LossAndGrad loss_and_grad(const PoincareModel& model, std::span<const HyponymyExample> batch) {
  LossAndGrad out;
  auto accumulate = [&](NodeId n, const Vector& g) {
    auto [it, inserted] = out.grads.try_emplace(n, g);
    if (!inserted) it->second += g;
  };

  std::vector<NodeId> candidates;
  std::vector<double> dist;
  for (const HyponymyExample& ex : batch) {
    if (ex.negatives.empty()) throw std::invalid_argument("loss_and_grad: empty negative set");
    candidates = ex.negatives;
    if (std::find(candidates.begin(), candidates.end(), ex.parent) == candidates.end()) {
      candidates.push_back(ex.parent);
    }
    const Vector u = model.vec(ex.child);
    dist.resize(candidates.size());
    double min_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      dist[i] = poincare_distance(u, model.vec(candidates[i]));
      min_d = std::min(min_d, dist[i]);
    }
    double sum = 0.0;
    for (double d : dist) sum += std::exp(-(d - min_d));
    const double log_z = -min_d + std::log(sum);
    const double d_pos = model.distance(ex.child, ex.parent);
    out.loss += d_pos + log_z;

    // d loss = d d_pos - sum_i p_i d d_i,  p = softmax(-d)
    const Vector v_pos = model.vec(ex.parent);
    accumulate(ex.child, poincare_distance_grad(u, v_pos));
    accumulate(ex.parent, poincare_distance_grad(v_pos, u));
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const double p = std::exp(-dist[i] - log_z);
      const Vector v = model.vec(candidates[i]);
      accumulate(ex.child, -p * poincare_distance_grad(u, v));
      accumulate(candidates[i], -p * poincare_distance_grad(v, u));
    }
  }
  return out;
}

void project_to_ball(Eigen::Ref<Vector> x, double ball_margin) {
  const double limit = 1.0 - ball_margin;
  const double norm = x.norm();
  // shrink by a few ulps so rounding cannot leave the norm above the limit
  if (norm >= limit) x *= (limit / norm) * (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
}

void riemannian_step(PoincareModel& model, const SparseGrads& grads, double lr,
                     double ball_margin) {
  for (const auto& [node, grad] : grads) {
    Vector theta = model.vec(node);
    theta -= lr * riemannian_scale(theta.squaredNorm()) * grad;
    project_to_ball(theta, ball_margin);
    model.row(node) = theta.transpose();
  }
}

PoincareModel train(const ClassHierarchy& hierarchy, const TrainConfig& cfg, TrainLog* log) {
  cfg.validate();
  if (hierarchy.empty() || hierarchy.hyponymy().empty()) {
    throw std::invalid_argument("train: hierarchy has no hyponymy edges");
  }
  const std::size_t n = hierarchy.node_count();
  Rng rng(cfg.seed);

  PoincareModel model(n, cfg.dim);
  std::uniform_real_distribution<double> init(-1e-3, 1e-3);
  for (Eigen::Index i = 0; i < model.data().size(); ++i) model.data().data()[i] = init(rng);

  // nodes joined to u by a hyponymy edge in either direction are never negatives
  std::vector<std::vector<NodeId>> related(n);
  for (auto [c, p] : hierarchy.hyponymy()) {
    related[c].push_back(p);
    related[p].push_back(c);
  }
  for (auto& r : related) std::sort(r.begin(), r.end());

  std::vector<std::pair<NodeId, NodeId>> edges(hierarchy.hyponymy().begin(),
                                               hierarchy.hyponymy().end());
  std::uniform_int_distribution<NodeId> any_node(0, static_cast<NodeId>(n - 1));
  std::vector<HyponymyExample> batch;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = epoch < cfg.burn_in_epochs ? cfg.lr / 10.0 : cfg.lr;
    std::shuffle(edges.begin(), edges.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < edges.size(); start += cfg.batch_size) {
      batch.clear();
      const std::size_t stop = std::min(edges.size(), start + cfg.batch_size);
      for (std::size_t e = start; e < stop; ++e) {
        auto [child, parent] = edges[e];
        HyponymyExample ex{child, parent, {parent}};
        const std::size_t eligible = n - 1 - related[child].size();
        if (eligible > 0) {
          while (ex.negatives.size() < cfg.neg_count + 1) {
            const NodeId x = any_node(rng);
            if (x == child || std::binary_search(related[child].begin(), related[child].end(), x)) {
              continue;
            }
            ex.negatives.push_back(x);
          }
        }
        batch.push_back(std::move(ex));
      }
      LossAndGrad lg = loss_and_grad(model, batch);
      epoch_loss += lg.loss;
      riemannian_step(model, lg.grads, lr, cfg.ball_margin);
      if (log) log->max_norm_seen = std::max(log->max_norm_seen, model.max_norm());
    }
    if (log) log->epoch_loss.push_back(epoch_loss);
  }
  return model;
}

Vector lookup_class_embedding(const PoincareModel& model, const KnowledgeGraph& g,
                              EntityId entity, const ClassHierarchy& hierarchy) {
  g.check(entity);
  auto cls = hierarchy.class_of(g.label(entity));
  if (!cls) {
    throw std::invalid_argument("entity '" + g.label(entity) + "' has no class assignment");
  }
  return model.vec(*cls);
}

ReconstructionMetrics evaluate_reconstruction(const PoincareModel& model,
                                              const ClassHierarchy& hierarchy,
                                              std::size_t negatives, std::uint64_t seed) {
  ReconstructionMetrics m;
  Rng rng(seed);
  const std::size_t n = hierarchy.node_count();
  std::uniform_int_distribution<NodeId> any_node(0, static_cast<NodeId>(n - 1));
  double rank_sum = 0.0;
  std::size_t closer = 0;
  std::size_t comparisons = 0;
  for (NodeId c = 0; c < n; ++c) {
    auto parent = hierarchy.parent(c);
    if (!parent) continue;
    auto anc = hierarchy.ancestors(c);
    if (anc.size() + 1 >= n) continue;
    const double d_parent = model.distance(c, *parent);
    std::size_t rank = 1;
    for (std::size_t k = 0; k < negatives;) {
      const NodeId x = any_node(rng);
      if (x == c || std::find(anc.begin(), anc.end(), x) != anc.end()) continue;
      const double d = model.distance(c, x);
      if (d < d_parent) ++rank;
      if (d_parent < d) ++closer;
      ++comparisons;
      ++k;
    }
    rank_sum += static_cast<double>(rank);
    ++m.pairs;
  }
  if (m.pairs > 0) {
    m.mean_rank = rank_sum / static_cast<double>(m.pairs);
    m.closer_rate = static_cast<double>(closer) / static_cast<double>(comparisons);
  }
  return m;
}

void write_embeddings(std::ostream& os, const PoincareModel& model,
                      const ClassHierarchy& hierarchy) {
  const auto old = os.precision(17);
  for (NodeId n = 0; n < model.node_count(); ++n) {
    os << hierarchy.label(n);
    for (double x : model.row(n)) os << '\t' << x;
    os << '\n';
  }
  os.precision(old);
}

void write_embedding_header(std::ostream& os, const PoincareModel& model, const TrainConfig& cfg) {
  os << "dim=" << model.dim() << "\n"
     << "nodes=" << model.node_count() << "\n"
     << "seed=" << cfg.seed << "\n"
     << "epochs=" << cfg.epochs << "\n"
     << "lr=" << cfg.lr << "\n"
     << "neg=" << cfg.neg_count << "\n"
     << "burn_in=" << cfg.burn_in_epochs << "\n"
     << "ball_margin=" << cfg.ball_margin << "\n";
}

}  // namespace kgaug
