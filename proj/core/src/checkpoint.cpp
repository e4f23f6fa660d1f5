#include "s2t/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace s2t {

namespace {

constexpr char kMagic[8] = {'S', '2', 'T', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

void write_string(std::ostream& os, const std::string& s) {
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& is) {
  const auto len = read_pod<std::uint32_t>(is);
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw std::runtime_error("checkpoint: truncated string");
  return s;
}

void write_doubles(std::ostream& os, const double* data, long n) {
  os.write(reinterpret_cast<const char*>(data),
           static_cast<std::streamsize>(sizeof(double)) * n);
}

void read_doubles(std::istream& is, double* data, long n) {
  is.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(sizeof(double)) * n);
  if (!is) throw std::runtime_error("checkpoint: truncated tensor");
}

}  // namespace

void save_checkpoint(const std::string& path, Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path);
  os.write(kMagic, sizeof(kMagic));
  write_string(os, ckpt.config_json);

  auto& p = ckpt.params;
  write_pod<std::int32_t>(os, p.num_nodes);
  write_pod<std::int32_t>(os, p.feat_dim);
  write_pod<std::int32_t>(os, p.dim);
  write_pod<std::int32_t>(os, p.layers);
  write_pod<std::uint8_t>(os, p.learn_etas ? 1 : 0);
  write_pod<double>(os, p.eta1);
  write_pod<double>(os, p.eta2);

  auto refs = p.tensors();
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(refs.size()));
  for (const auto& r : refs) {
    write_string(os, r.name);
    write_pod<std::int64_t>(os, r.rows);
    write_pod<std::int64_t>(os, r.cols);
    write_doubles(os, r.data, r.size());
  }

  write_pod<std::int64_t>(os, ckpt.global_state.z_g.cols());
  write_doubles(os, ckpt.global_state.z_g.data(), ckpt.global_state.z_g.cols());
  write_pod<double>(os, ckpt.global_state.weight);

  write_pod<double>(os, ckpt.adam.lr);
  write_pod<double>(os, ckpt.adam.beta1);
  write_pod<double>(os, ckpt.adam.beta2);
  write_pod<double>(os, ckpt.adam.eps);
  write_pod<std::int64_t>(os, ckpt.adam.step);
  for (size_t i = 0; i < refs.size(); ++i) {
    write_doubles(os, ckpt.adam.m[i].data(), ckpt.adam.m[i].size());
    write_doubles(os, ckpt.adam.v[i].data(), ckpt.adam.v[i].size());
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("checkpoint: bad magic in " + path);
  }
  Checkpoint ckpt;
  ckpt.config_json = read_string(is);

  const auto num_nodes = read_pod<std::int32_t>(is);
  const auto feat_dim = read_pod<std::int32_t>(is);
  const auto dim = read_pod<std::int32_t>(is);
  const auto layers = read_pod<std::int32_t>(is);
  const bool learn_etas = read_pod<std::uint8_t>(is) != 0;
  const double eta1 = read_pod<double>(is);
  const double eta2 = read_pod<double>(is);

  ckpt.params = init_params(num_nodes, feat_dim, dim, layers, 0, learn_etas);
  ckpt.params.eta1 = eta1;
  ckpt.params.eta2 = eta2;

  auto refs = ckpt.params.tensors();
  const auto count = read_pod<std::uint32_t>(is);
  if (count != refs.size()) {
    throw std::runtime_error("checkpoint: tensor count mismatch");
  }
  for (auto& r : refs) {
    const std::string name = read_string(is);
    const auto rows = read_pod<std::int64_t>(is);
    const auto cols = read_pod<std::int64_t>(is);
    if (name != r.name || rows != r.rows || cols != r.cols) {
      throw std::runtime_error("checkpoint: tensor layout mismatch at " + name);
    }
    read_doubles(is, r.data, r.size());
  }

  const auto zg_len = read_pod<std::int64_t>(is);
  ckpt.global_state.z_g = Eigen::RowVectorXd::Zero(zg_len);
  read_doubles(is, ckpt.global_state.z_g.data(), zg_len);
  ckpt.global_state.weight = read_pod<double>(is);

  ckpt.adam.lr = read_pod<double>(is);
  ckpt.adam.beta1 = read_pod<double>(is);
  ckpt.adam.beta2 = read_pod<double>(is);
  ckpt.adam.eps = read_pod<double>(is);
  ckpt.adam.step = read_pod<std::int64_t>(is);
  for (const auto& r : refs) {
    Eigen::MatrixXd m(r.rows, r.cols), v(r.rows, r.cols);
    read_doubles(is, m.data(), m.size());
    read_doubles(is, v.data(), v.size());
    ckpt.adam.m.push_back(std::move(m));
    ckpt.adam.v.push_back(std::move(v));
  }
  return ckpt;
}

}  // namespace s2t
