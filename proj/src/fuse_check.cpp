#include "kgaug/fuse_check.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <sstream>

#include "kgaug/encoder.hpp"
#include "kgaug/gradcheck.hpp"
#include "kgaug/poincare.hpp"

namespace kgaug::fusion {

namespace {

using gradcheck::central_difference;
using gradcheck::flatten;
using gradcheck::relative_error;

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = u(rng);
  }
  return m;
}

Eigen::VectorXd concat(const std::vector<Eigen::VectorXd>& parts) {
  Eigen::Index total = 0;
  for (const auto& p : parts) total += p.size();
  Eigen::VectorXd out(total);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.segment(at, p.size()) = p;
    at += p.size();
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

bool is_infusion(const std::string& name) { return name.rfind("infusion.", 0) == 0; }

}  // namespace

double infusion_gradient_error(const FuseCheckConfig& cfg) {
  double worst = 0.0;
  const FusionDims dims{8, 8, 8, 8, 1, 2};
  for (std::size_t inst = 0; inst < cfg.instances; ++inst) {
    Rng rng(derive_seed(cfg.seed, 0x1f, inst));
    FusionParams p = FusionParams::init(dims, derive_seed(cfg.seed, 0x2f, inst));
    Matrix cls = random_matrix(3, 8, rng);
    Matrix repr = random_matrix(3, 8, rng);
    const Matrix readout = random_matrix(3, 8, rng);
    auto f = [&] { return entity_space_infusion(cls, repr, p).cwiseProduct(readout).sum(); };

    InfusionCache cache;
    entity_space_infusion(cls, repr, p, &cache);
    FusionParams grads = p.zeros_like();
    auto [d_cls, d_repr] = entity_space_infusion_backward(cache, readout, p, grads);

    std::vector<Eigen::VectorXd> analytic, numeric;
    auto named = named_tensors(p);
    auto named_grads = named_tensors(grads);
    for (std::size_t i = 0; i < named.size(); ++i) {
      if (!is_infusion(named[i].first)) continue;
      analytic.push_back(flatten(*named_grads[i].second));
      numeric.push_back(central_difference(f, *named[i].second, cfg.step));
    }
    analytic.push_back(flatten(d_cls));
    numeric.push_back(central_difference(f, cls, cfg.step));
    analytic.push_back(flatten(d_repr));
    numeric.push_back(central_difference(f, repr, cfg.step));
    worst = std::max(worst, relative_error(concat(analytic), concat(numeric)));
  }
  return worst;
}

double injector_gradient_error(const FuseCheckConfig& cfg, Aggregation aggregation) {
  double worst = 0.0;
  const auto d1 = static_cast<Eigen::Index>(cfg.dims.d1);
  const auto d3 = static_cast<Eigen::Index>(cfg.dims.d3);
  for (std::size_t inst = 0; inst < cfg.instances; ++inst) {
    Rng rng(derive_seed(cfg.seed, 0x3f, inst));
    FusionParams p = FusionParams::init(cfg.dims, derive_seed(cfg.seed, 0x4f, inst));
    p.aggregation = aggregation;
    Matrix tokens = random_matrix(5, d1, rng);
    Matrix entities = random_matrix(2, d3, rng);
    const Alignment alignment{1, 3};
    const Matrix read_t = random_matrix(5, d1, rng);
    const Matrix read_e = random_matrix(2, d3, rng);
    auto f = [&] {
      auto [t, e] = knowledge_injector(entities, tokens, alignment, p);
      return t.cwiseProduct(read_t).sum() + e.cwiseProduct(read_e).sum();
    };

    InjectorStackCache cache;
    knowledge_injector(entities, tokens, alignment, p, &cache);
    FusionParams grads = p.zeros_like();
    auto [d_entities, d_tokens] = knowledge_injector_backward(cache, read_t, read_e, p, grads);

    std::vector<Eigen::VectorXd> analytic, numeric;
    auto named = named_tensors(p);
    auto named_grads = named_tensors(grads);
    for (std::size_t i = 0; i < named.size(); ++i) {
      if (is_infusion(named[i].first)) continue;
      analytic.push_back(flatten(*named_grads[i].second));
      numeric.push_back(central_difference(f, *named[i].second, cfg.step));
    }
    analytic.push_back(flatten(d_entities));
    numeric.push_back(central_difference(f, entities, cfg.step));
    analytic.push_back(flatten(d_tokens));
    numeric.push_back(central_difference(f, tokens, cfg.step));
    worst = std::max(worst, relative_error(concat(analytic), concat(numeric)));
  }
  return worst;
}

double info_nce_gradient_error(const FuseCheckConfig& cfg) {
  double worst = 0.0;
  for (std::size_t inst = 0; inst < cfg.instances; ++inst) {
    Rng rng(derive_seed(cfg.seed, 0x5f, inst));
    std::uniform_real_distribution<double> tau_dist(0.5, 2.0);
    const double tau = tau_dist(rng);
    std::vector<ContrastiveItem> items(2);
    for (auto& item : items) {
      item.anchor = random_matrix(1, 8, rng).row(0);
      item.positive = random_matrix(1, 8, rng).row(0);
      for (int l = 0; l < 3; ++l) item.negatives.push_back(random_matrix(1, 8, rng).row(0));
    }
    ContrastiveGrads grads;
    info_nce(items, tau, &grads);
    auto f = [&] { return info_nce(items, tau); };

    std::vector<Eigen::VectorXd> analytic, numeric;
    for (std::size_t j = 0; j < items.size(); ++j) {
      analytic.push_back(flatten(grads.anchor[j]));
      numeric.push_back(central_difference(f, items[j].anchor, cfg.step));
      analytic.push_back(flatten(grads.positive[j]));
      numeric.push_back(central_difference(f, items[j].positive, cfg.step));
      for (std::size_t l = 0; l < items[j].negatives.size(); ++l) {
        analytic.push_back(flatten(grads.negatives[j][l]));
        numeric.push_back(central_difference(f, items[j].negatives[l], cfg.step));
      }
    }
    worst = std::max(worst, relative_error(concat(analytic), concat(numeric)));
  }
  return worst;
}

double poincare_loss_gradient_error(const FuseCheckConfig& cfg) {
  double worst = 0.0;
  constexpr std::size_t kNodes = 5;
  constexpr std::size_t kDim = 4;
  for (std::size_t inst = 0; inst < cfg.instances; ++inst) {
    Rng rng(derive_seed(cfg.seed, 0x6f, inst));
    PoincareModel model(kNodes, kDim);
    std::uniform_real_distribution<double> radius(0.05, 0.8);
    std::normal_distribution<double> gauss;
    for (NodeId n = 0; n < kNodes; ++n) {
      Vector v(kDim);
      for (auto& x : v) x = gauss(rng);
      model.row(n) = (radius(rng) / v.norm() * v).transpose();
    }
    // child 0..2, parent the next node, negatives all nodes except the child
    std::vector<HyponymyExample> batch;
    for (NodeId c = 0; c < 3; ++c) {
      HyponymyExample ex{c, static_cast<NodeId>(c + 1), {}};
      for (NodeId x = 0; x < kNodes; ++x) {
        if (x != c) ex.negatives.push_back(x);
      }
      batch.push_back(std::move(ex));
    }
    const LossAndGrad lg = loss_and_grad(model, batch);
    Eigen::VectorXd analytic = Eigen::VectorXd::Zero(kNodes * kDim);
    for (const auto& [node, g] : lg.grads) {
      analytic.segment(static_cast<Eigen::Index>(node * kDim), kDim) = g;
    }
    auto f = [&] { return loss_and_grad(model, batch).loss; };
    const Eigen::VectorXd numeric = central_difference(f, model.data(), cfg.step);
    worst = std::max(worst, relative_error(analytic, numeric));
  }
  return worst;
}

std::vector<PropertyResult> run_fuse_check(const FuseCheckConfig& cfg) {
  std::vector<PropertyResult> out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };
  Rng rng(cfg.seed);

  add("gelu(0) = 0", nn::gelu(0.0) == 0.0, "gelu(0)=" + fmt(nn::gelu(0.0)));
  add("gelu(10) within 1e-6 of 10", std::abs(nn::gelu(10.0) - 10.0) < 1e-6,
      "|gelu(10)-10|=" + fmt(std::abs(nn::gelu(10.0) - 10.0)));

  {
    double worst_mean = 0.0, worst_var = 0.0;
    for (std::size_t i = 0; i < cfg.instances; ++i) {
      const Matrix y = nn::layer_norm(random_matrix(1, 16, rng, 3.0));
      worst_mean = std::max(worst_mean, std::abs(y.mean()));
      worst_var = std::max(worst_var, std::abs(y.squaredNorm() / 16.0 - 1.0));
    }
    add("layer_norm mean within 1e-9 of 0", worst_mean < 1e-9, "worst |mean|=" + fmt(worst_mean));
    add("layer_norm variance within 1e-6 of 1", worst_var < 1e-6,
        "worst |var-1|=" + fmt(worst_var));
    const Matrix flat = nn::layer_norm(Matrix::Constant(1, 16, 2.5));
    add("layer_norm of a constant vector is zero", flat.cwiseAbs().maxCoeff() == 0.0,
        "max |y|=" + fmt(flat.cwiseAbs().maxCoeff()));
  }

  {
    const double e = infusion_gradient_error(cfg);
    add("entity_space_infusion gradient", e < cfg.tolerance, "worst rel err=" + fmt(e));
  }
  {
    FusionParams p = FusionParams::init(cfg.dims, cfg.seed);
    const auto d1 = static_cast<Eigen::Index>(cfg.dims.d1);
    const auto d2 = static_cast<Eigen::Index>(cfg.dims.d2);
    const Matrix cls = random_matrix(4, d2, rng);
    const Matrix repr = random_matrix(4, d1, rng);
    Matrix joined(4, d2 + d1);
    joined << cls, repr;
    const Matrix whole = joined * p.infuse_weight;
    const Matrix split = cls * p.infuse_weight.topRows(d2) + repr * p.infuse_weight.bottomRows(d1);
    const double diff = (whole - split).cwiseAbs().maxCoeff();
    add("infusion concatenation split agrees to 1e-12", diff < 1e-12, "max diff=" + fmt(diff));
  }
  {
    const double e = injector_gradient_error(cfg, Aggregation::Sequential);
    add("injector_layer gradient (sequential stack)", e < cfg.tolerance, "worst rel err=" + fmt(e));
    FuseCheckConfig few = cfg;
    few.instances = std::max<std::size_t>(1, cfg.instances / 4);
    const double s = injector_gradient_error(few, Aggregation::LiteralSum);
    add("injector_layer gradient (literal sum)", s < cfg.tolerance, "worst rel err=" + fmt(s));
  }
  {
    const double e = info_nce_gradient_error(cfg);
    add("info_nce gradient", e < cfg.tolerance, "worst rel err=" + fmt(e));
  }
  {
    const double e = poincare_loss_gradient_error(cfg);
    add("hyponymy softmax loss gradient", e < cfg.tolerance, "worst rel err=" + fmt(e));
  }

  {
    RowVector a(2), pos(2), neg(2);
    a << 1, 0;
    pos << 1, 0;
    neg << 0, 1;
    const double l = info_nce(a, pos, std::vector<RowVector>{neg}, 1.0);
    const double want = std::log1p(std::exp(-1.0));
    add("info_nce single negative = log(1+e^-1)", std::abs(l - want) < 1e-9,
        "loss=" + fmt(l) + " diff=" + fmt(std::abs(l - want)));
  }
  {
    double worst = 0.0;
    for (std::size_t k = 1; k <= 5; ++k) {
      const RowVector v = random_matrix(1, 8, rng).row(0);
      const std::vector<RowVector> negs(k, v);
      worst = std::max(worst, std::abs(info_nce(v, v, negs, 1.0) - std::log(k + 1.0)));
    }
    add("info_nce equal logits = log(k+1)", worst < 1e-9, "worst diff=" + fmt(worst));
  }
  {
    double worst = 0.0;
    bool positive = true;
    for (std::size_t i = 0; i < cfg.instances; ++i) {
      const RowVector a = random_matrix(1, 8, rng).row(0);
      const RowVector p = random_matrix(1, 8, rng).row(0);
      std::vector<RowVector> negs{random_matrix(1, 8, rng).row(0), random_matrix(1, 8, rng).row(0)};
      const double base = info_nce(a, p, negs, 0.7);
      positive = positive && base > 0.0;
      std::vector<RowVector> scaled_negs;
      for (const auto& n : negs) scaled_negs.push_back(3.7 * n);
      worst = std::max(worst, std::abs(info_nce(3.7 * a, 3.7 * p, scaled_negs, 0.7) - base));
    }
    add("info_nce invariant under common rescaling", worst < 1e-9, "worst diff=" + fmt(worst));
    add("info_nce strictly positive", positive, "");
  }
  {
    RowVector a(3), p(3), n1(3), n2(3);
    a << 1, 0.2, 0;
    p << 0.9, 0.3, 0.1;
    n1 << -0.5, 1, 0;
    n2 << 0, 0.1, 1;
    const std::vector<RowVector> negs{n1, n2};
    bool monotone = true;
    double prev = info_nce(a, p, negs, 2.0);
    for (double tau : {1.0, 0.5, 0.25, 0.1}) {
      const double l = info_nce(a, p, negs, tau);
      monotone = monotone && l < prev;
      prev = l;
    }
    add("info_nce decreases with temperature when the positive wins", monotone, "");
  }
  {
    const double t = total_loss(2.0, 4.0, 0.5, 0.5);
    add("total_loss(2, 4, 0.5, 0.5) = 3", t == 3.0, "value=" + fmt(t));
    add("total_loss with zero contrastive weight", total_loss(2.0, 4.0, 0.5, 0.0) == 1.0, "");
  }
  {
    EncoderConfig ec{cfg.dims.d1, 2, cfg.dims.heads, 64};
    EncoderStub stub({"a", "r", "b", "c", "s", "d"}, ec, cfg.seed);
    const std::vector<std::string> toks{"[CLS]", "a", "r", "b", "c", "s", "d"};
    const std::vector<std::string> swapped{"[CLS]", "c", "s", "d", "a", "r", "b"};
    const std::vector<int> pos{0, 1, 1, 1, 2, 2, 2};
    const RowVector s1 = stub.summary(toks, pos);
    const RowVector s2 = stub.summary(toks, pos);
    const RowVector s3 = stub.summary(swapped, pos);
    add("encoder summary deterministic", s1 == s2, "");
    add("encoder summary depends on triple positions", (s1 - s3).norm() > 1e-9,
        "|diff|=" + fmt((s1 - s3).norm()));
  }
  return out;
}

void print_results(std::ostream& os, const std::vector<PropertyResult>& results) {
  for (const auto& r : results) {
    os << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) os << "  (" << r.detail << ")";
    os << '\n';
  }
}

}  // namespace kgaug::fusion
