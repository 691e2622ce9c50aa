#include "hotcs/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hotcs {

namespace {

[[noreturn]] void bad_file(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

std::ifstream open_input(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) bad_file(path, "cannot open for reading");
  return in;
}

std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

// Next whitespace-delimited token in a PGM header, skipping '#' comments.
std::string pgm_token(std::istream& in, const std::string& path) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) bad_file(path, "truncated header");
  return tok;
}

long parse_positive(const std::string& tok, const std::string& path,
                    const std::string& what) {
  std::size_t pos = 0;
  long value = 0;
  try {
    value = std::stol(tok, &pos);
  } catch (const std::exception&) {
    bad_file(path, "bad " + what + " '" + tok + "'");
  }
  if (pos != tok.size() || value < 1) bad_file(path, "bad " + what + " '" + tok + "'");
  return value;
}

}  // namespace

RMatrix load_pgm(const std::string& path) {
  auto in = open_input(path, std::ios::in | std::ios::binary);
  if (pgm_token(in, path) != "P5") bad_file(path, "not a binary PGM (magic != P5)");
  const long cols = parse_positive(pgm_token(in, path), path, "width");
  const long rows = parse_positive(pgm_token(in, path), path, "height");
  const long maxval = parse_positive(pgm_token(in, path), path, "maxval");
  if (maxval > 255) bad_file(path, "only 8-bit PGM supported");
  // The header ends with exactly one whitespace byte, already consumed by
  // the tokenizer.

  std::vector<unsigned char> data(static_cast<std::size_t>(rows * cols));
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    bad_file(path, "pixel data truncated");
  }

  RMatrix img(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      img(r, c) = static_cast<double>(data[static_cast<std::size_t>(r * cols + c)]) /
                  static_cast<double>(maxval);
    }
  }
  return img;
}

void write_pgm(const std::string& path, const RMatrix& img) {
  if (img.rows() < 1 || img.cols() < 1) {
    throw std::invalid_argument("write_pgm: empty image");
  }
  auto out = open_output(path, std::ios::out | std::ios::binary);
  out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
  std::vector<unsigned char> data(static_cast<std::size_t>(img.rows() * img.cols()));
  for (Index r = 0; r < img.rows(); ++r) {
    for (Index c = 0; c < img.cols(); ++c) {
      const double v = std::clamp(img(r, c), 0.0, 1.0);
      data[static_cast<std::size_t>(r * img.cols() + c)] =
          static_cast<unsigned char>(std::lround(v * 255.0));
    }
  }
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error(path + ": write failed");
}

CVector load_csv_vector(const std::string& path) {
  auto in = open_input(path);
  std::vector<Complex> values;
  std::string line;
  int fields = 0;  // 1 = real, 2 = complex, set by the first data line
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::istringstream ls(line);
    std::string cell;
    std::vector<double> parsed;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) {
          ++pos;
        }
        if (pos != cell.size()) throw std::invalid_argument("trailing junk");
        parsed.push_back(v);
      } catch (const std::exception&) {
        bad_file(path, "line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (parsed.size() != 1 && parsed.size() != 2) {
      bad_file(path, "line " + std::to_string(line_no) + ": expected 1 or 2 fields");
    }
    if (fields == 0) fields = static_cast<int>(parsed.size());
    if (static_cast<int>(parsed.size()) != fields) {
      bad_file(path, "line " + std::to_string(line_no) + ": inconsistent field count");
    }
    values.emplace_back(parsed[0], fields == 2 ? parsed[1] : 0.0);
  }
  if (values.empty()) bad_file(path, "no data");

  CVector v(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
      bad_file(path, "non-finite value");
    }
    v[static_cast<Index>(i)] = values[i];
  }
  return v;
}

void write_csv_vector(const std::string& path, const CVector& v) {
  auto out = open_output(path);
  bool complex_data = false;
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i].imag() != 0.0) {
      complex_data = true;
      break;
    }
  }
  for (Index i = 0; i < v.size(); ++i) {
    out << format_double(v[i].real());
    if (complex_data) out << "," << format_double(v[i].imag());
    out << "\n";
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw std::invalid_argument("write_csv: row width != header width");
    }
  }
  auto out = open_output(path);
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << format_double(row[i]);
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

nlohmann::json load_json_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad_file(path, e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  auto out = open_output(path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

namespace {

nlohmann::json complex_to_json(const Complex& z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

Complex complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("posterior json: complex values are [re, im]");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

nlohmann::json posterior_to_json(const PosteriorTransform& t) {
  nlohmann::json prior;
  prior["kind"] = to_string(t.prior().kind());
  prior["dim"] = t.prior().dim();
  if (t.prior().kind() == PriorKind::Haar) prior["levels"] = t.prior().levels();
  if (t.prior().kind() == PriorKind::Custom) {
    nlohmann::json rows = nlohmann::json::array();
    const CMatrix& d = t.prior().matrix();
    for (Index r = 0; r < d.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Index c = 0; c < d.cols(); ++c) row.push_back(complex_to_json(d(r, c)));
      rows.push_back(std::move(row));
    }
    prior["matrix"] = std::move(rows);
  }

  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.steps()) {
    nlohmann::json step;
    step["pivot"] = s.pivot;
    step["alpha"] = complex_to_json(s.alpha);
    step["trivial"] = s.trivial;
    if (s.factor) {
      nlohmann::json v = nlohmann::json::array();
      for (Index idx : s.factor->support) v.push_back(complex_to_json(s.factor->v[idx]));
      step["v"] = std::move(v);
      step["support"] = s.factor->support;
    }
    steps.push_back(std::move(step));
  }

  return nlohmann::json{{"schema_version", 1}, {"prior", prior}, {"steps", steps}};
}

namespace {

PosteriorTransform posterior_from_json_impl(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema_version", 0) != 1) {
    throw std::invalid_argument("posterior json: unsupported schema");
  }
  const auto& pj = j.at("prior");
  const Index dim = pj.at("dim").get<Index>();
  const PriorKind kind = prior_kind_from_string(pj.at("kind").get<std::string>());

  auto build_prior = [&]() -> PriorTransform {
    switch (kind) {
      case PriorKind::Identity: return PriorTransform::identity(dim);
      case PriorKind::Dft: return PriorTransform::dft(dim);
      case PriorKind::Dct2: return PriorTransform::dct2(dim);
      case PriorKind::Haar: return PriorTransform::haar(dim, pj.value("levels", 0));
      case PriorKind::Custom: {
        const auto& rows = pj.at("matrix");
        if (!rows.is_array() || static_cast<Index>(rows.size()) != dim) {
          throw std::invalid_argument("posterior json: bad custom matrix");
        }
        CMatrix d(dim, dim);
        for (Index r = 0; r < dim; ++r) {
          const auto& row = rows[static_cast<std::size_t>(r)];
          if (!row.is_array() || static_cast<Index>(row.size()) != dim) {
            throw std::invalid_argument("posterior json: bad custom matrix row");
          }
          for (Index c = 0; c < dim; ++c) {
            d(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
          }
        }
        return PriorTransform::custom(std::move(d));
      }
    }
    throw std::invalid_argument("posterior json: unknown prior kind");
  };

  std::vector<HotStep> steps;
  for (const auto& sj : j.at("steps")) {
    HotStep step;
    step.pivot = sj.at("pivot").get<Index>();
    step.alpha = complex_from_json(sj.at("alpha"));
    step.trivial = sj.at("trivial").get<bool>();
    if (!step.trivial) {
      const auto& support = sj.at("support");
      const auto& vj = sj.at("v");
      if (support.size() != vj.size()) {
        throw std::invalid_argument("posterior json: v/support length mismatch");
      }
      CVector v = CVector::Zero(dim);
      std::vector<Index> sup;
      for (std::size_t i = 0; i < support.size(); ++i) {
        const Index idx = support[i].get<Index>();
        if (idx < 0 || idx >= dim) {
          throw std::invalid_argument("posterior json: support index out of range");
        }
        v[idx] = complex_from_json(vj[i]);
        sup.push_back(idx);
      }
      step.factor = make_householder(std::move(v), std::move(sup));
    }
    steps.push_back(std::move(step));
  }
  return PosteriorTransform(build_prior(), std::move(steps));
}

}  // namespace

PosteriorTransform posterior_from_json(const nlohmann::json& j) {
  try {
    return posterior_from_json_impl(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("posterior json: ") + e.what());
  }
}

void write_manifest(const std::string& path, const nlohmann::json& config,
                    std::uint64_t seed, const nlohmann::json& extras) {
  nlohmann::json m;
  m["schema_version"] = 1;
  m["config"] = config;
  m["seed"] = seed;
  for (auto it = extras.begin(); it != extras.end(); ++it) m[it.key()] = it.value();
  write_json_file(path, m);
}

nlohmann::json load_manifest(const std::string& path) {
  nlohmann::json m = load_json_file(path);
  if (m.value("schema_version", 0) != 1) {
    throw std::invalid_argument(path + ": unsupported manifest schema");
  }
  return m;
}

}  // namespace hotcs
