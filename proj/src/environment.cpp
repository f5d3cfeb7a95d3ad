#include "pob/environment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace pob {

Vec ContextLaw::sample(int d_x, Rng& rng) const {
  if (!support.empty()) return support[rng.uniform_int(static_cast<int>(support.size()))];
  return rng.uniform_box(d_x, half_width);
}

double ContextLaw::sup_norm_bound(int d_x) const {
  if (!support.empty()) {
    double m = 0.0;
    for (const auto& p : support) m = std::max(m, p.norm());
    return m;
  }
  return half_width * std::sqrt(static_cast<double>(d_x));
}

SyntheticEnv::SyntheticEnv(std::vector<Vec> theta_star, std::vector<Vec> beta_star,
                           PhiMap phi, ContextLaw context_law, double sigma_eps,
                           double r_eta, bool noiseless_reward)
    : theta_star_(std::move(theta_star)),
      beta_star_(std::move(beta_star)),
      phi_(std::move(phi)),
      context_law_(std::move(context_law)),
      sigma_eps_(sigma_eps),
      l_eps_(4.0 * sigma_eps * std::sqrt(static_cast<double>(phi_.out_dim()))),
      r_eta_(r_eta),
      noiseless_reward_(noiseless_reward) {
  if (theta_star_.empty() || theta_star_.size() != beta_star_.size()) {
    throw std::invalid_argument("env: need matching, nonempty theta/beta lists");
  }
  for (std::size_t a = 0; a < theta_star_.size(); ++a) {
    if (theta_star_[a].size() != phi_.in_dim() || beta_star_[a].size() != phi_.out_dim()) {
      throw std::invalid_argument("env: arm " + std::to_string(a) + " parameter dimensions do not match phi");
    }
    if (theta_star_[a].norm() > 1.0 + 1e-12 || beta_star_[a].norm() > 1.0 + 1e-12) {
      throw std::invalid_argument("env: arm " + std::to_string(a) + " parameters exceed unit norm");
    }
  }
  if (sigma_eps_ < 0.0 || r_eta_ < 0.0) {
    throw std::invalid_argument("env: noise scales must be nonnegative");
  }
}

std::pair<Vec, Vec> SyntheticEnv::sample_round(Rng& rng) const {
  const Vec x = context_law_.sample(d_x(), rng);
  return {x, sample_post_context(x, rng)};
}

Vec SyntheticEnv::sample_post_context(const Vec& x, Rng& rng) const {
  Vec z = phi_(x);
  if (sigma_eps_ > 0.0) {
    Vec eps = rng.normal_vec(d_z(), sigma_eps_);
    while (eps.norm() > l_eps_) eps = rng.normal_vec(d_z(), sigma_eps_);
    z += eps;
  }
  return z;
}

double SyntheticEnv::realized_reward(int arm, const Vec& x, const Vec& z, Rng& rng) const {
  check_arm(arm);
  if (noiseless_reward_) return mean_reward(arm, x);
  double r = theta_star_[arm].dot(x) + beta_star_[arm].dot(z);
  if (r_eta_ > 0.0) r += r_eta_ * rng.normal();
  return r;
}

double SyntheticEnv::mean_reward(int arm, const Vec& x) const {
  check_arm(arm);
  return theta_star_[arm].dot(x) + beta_star_[arm].dot(phi_(x));
}

int SyntheticEnv::best_arm(const Vec& x) const {
  int best = 0;
  double best_value = mean_reward(0, x);
  for (int a = 1; a < arm_count(); ++a) {
    const double v = mean_reward(a, x);
    if (v > best_value) {
      best = a;
      best_value = v;
    }
  }
  return best;
}

double SyntheticEnv::l_z() const { return phi_.out_bound() + l_eps_; }

void SyntheticEnv::check_arm(int arm) const {
  if (arm < 0 || arm >= arm_count()) {
    throw std::out_of_range("env: arm " + std::to_string(arm) + " out of range [0, " +
                            std::to_string(arm_count()) + ")");
  }
}

SyntheticEnv counterexample_env() {
  std::vector<Vec> theta(2, Vec(1));
  std::vector<Vec> beta(2, Vec(1));
  theta[0][0] = 1.0;
  theta[1][0] = -1.0;
  beta[0][0] = 0.5;
  beta[1][0] = -0.5;
  PhiMap square = PhiMap::custom([](const Vec& x) { return Vec::Constant(1, x[0] * x[0]); }, 1, 1, 9.0);
  ContextLaw law;
  law.support = {Vec::Constant(1, -3.0), Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)};
  return SyntheticEnv(std::move(theta), std::move(beta), std::move(square), std::move(law),
                      /*sigma_eps=*/0.0, /*r_eta=*/0.0, /*noiseless_reward=*/true);
}

ReplayEnv::ReplayEnv(int d_x, int d_z, std::vector<Vec> items, std::vector<Vec> users)
    : d_x_(d_x), d_z_(d_z), items_(std::move(items)), users_(std::move(users)) {
  if (d_x_ <= 0 || d_z_ < 0) throw std::invalid_argument("replay: bad dimensions");
  if (items_.empty() || users_.empty()) throw std::invalid_argument("replay: need items and users");
  for (const auto& v : items_) {
    if (v.size() != d_x_ + d_z_) throw std::invalid_argument("replay: item row dimension mismatch");
  }
  for (const auto& v : users_) {
    if (v.size() != d_x_ + d_z_) throw std::invalid_argument("replay: user row dimension mismatch");
  }
}

int ReplayEnv::sample_user(Rng& rng) const { return rng.uniform_int(user_count()); }

double ReplayEnv::reward(int user, int arm) const { return users_.at(user).dot(items_.at(arm)); }

int ReplayEnv::best_arm(int user) const {
  int best = 0;
  double best_value = reward(user, 0);
  for (int a = 1; a < arm_count(); ++a) {
    const double v = reward(user, a);
    if (v > best_value) {
      best = a;
      best_value = v;
    }
  }
  return best;
}

double ReplayEnv::max_user_norm() const {
  double m = 0.0;
  for (const auto& u : users_) m = std::max(m, u.norm());
  for (const auto& v : items_) m = std::max(m, v.norm());
  return m;
}

double ReplayEnv::max_x_norm() const {
  double m = 0.0;
  for (const auto& u : users_) m = std::max(m, u.head(d_x_).norm());
  return m;
}

double ReplayEnv::max_z_norm() const {
  double m = 0.0;
  for (const auto& u : users_) m = std::max(m, u.tail(d_z_).norm());
  return m;
}

namespace {

std::vector<double> parse_row(const std::string& line, int line_no) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &pos);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": non-numeric field '" + cell + "'");
    }
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
    if (pos != cell.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": non-numeric field '" + cell + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::string trimmed(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && s[b] == ' ') ++b;
  return s.substr(b);
}

}  // namespace

ReplayEnv load_replay(const std::string& path, int max_items) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open feature table: " + path);

  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) throw ParseError("line 1: empty feature table");
  ++line_no;
  int d_x = 0;
  int d_z = 0;
  {
    std::stringstream ss(trimmed(line));
    std::string k1, v1, k2, v2;
    if (!std::getline(ss, k1, ',') || !std::getline(ss, v1, ',') ||
        !std::getline(ss, k2, ',') || !std::getline(ss, v2, ',') || k1 != "d_x" || k2 != "d_z") {
      throw ParseError("line 1: header must be 'd_x,<int>,d_z,<int>'");
    }
    try {
      d_x = std::stoi(v1);
      d_z = std::stoi(v2);
    } catch (const std::exception&) {
      throw ParseError("line 1: header dimensions must be integers");
    }
    if (d_x <= 0 || d_z < 0) throw ParseError("line 1: dimensions out of range");
  }

  std::vector<Vec> items;
  std::vector<Vec> users;
  std::vector<Vec>* section = nullptr;
  const int row_len = d_x + d_z;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trimmed(line);
    if (t.empty()) continue;
    if (t == "[items]") {
      section = &items;
      continue;
    }
    if (t == "[users]") {
      section = &users;
      continue;
    }
    if (section == nullptr) {
      throw ParseError("line " + std::to_string(line_no) + ": data before any section marker");
    }
    const std::vector<double> row = parse_row(t, line_no);
    if (static_cast<int>(row.size()) != row_len) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(row_len) +
                       " fields, got " + std::to_string(row.size()));
    }
    section->push_back(Eigen::Map<const Vec>(row.data(), row_len));
  }

  if (max_items > 0 && static_cast<int>(items.size()) > max_items) {
    items.resize(max_items);
  }
  return ReplayEnv(d_x, d_z, std::move(items), std::move(users));
}

}  // namespace pob
