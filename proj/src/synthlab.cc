// synthlab.cc

// Copyright 2026  The grasslid Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "grasslid/synthlab.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "grasslid/error.h"
#include "grasslid/parallel.h"

namespace grasslid {

namespace {

constexpr double kDistributionTolerance = 1e-12;

int IntPow(int base, int exp) {
  int r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void CheckDistribution(const Eigen::Ref<const Vector> &p,
                       const std::string &what) {
  if (!p.allFinite() || p.minCoeff() < 0.0)
    GRASSLID_THROW(InputError, what, ": negative or non-finite probability");
  double s = p.sum();
  if (std::abs(s - 1.0) > kDistributionTolerance)
    GRASSLID_THROW(InputError, what, ": sums to ", s);
}

int Draw(const Eigen::Ref<const Vector> &p, std::mt19937_64 &rng) {
  std::discrete_distribution<int> dist(p.data(), p.data() + p.size());
  return dist(rng);
}

bool ParseBool(const std::string &text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  GRASSLID_THROW(FormatError, "expected true/false, got '", text, "'");
}

int ParsePositive(const KeyValueList &kv, const std::string &key) {
  long long v = ParseInt(LookupKey(kv, key));
  if (v < 0 || v > (1 << 30))
    GRASSLID_THROW(InputError, key, " out of range: ", v);
  return static_cast<int>(v);
}

Matrix ReadTable(const std::filesystem::path &path) {
  if (path.extension() == ".csv") return ReadCsvMatrix(path);
  return ReadMatrixFile(path);
}

std::vector<std::string> Words(const std::string &text) {
  std::istringstream is(text);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

std::string UtteranceId(const std::string &lang, const std::string &split,
                        int index) {
  std::ostringstream os;
  os << lang << '-' << split << '-' << std::setw(4) << std::setfill('0')
     << index;
  return os.str();
}

}  // namespace

void SyntheticLanguage::Check() const {
  if (name.empty() || name.find_first_of(" \t\n/") != std::string::npos)
    GRASSLID_THROW(InputError, "language name '", name,
                   "' must be non-empty without spaces or '/'");
  if (order != 1 && order != 2)
    GRASSLID_THROW(InputError, "language ", name, ": order must be 1 or 2");
  if (num_units < 2)
    GRASSLID_THROW(InputError, "language ", name, ": needs >= 2 units");
  const int histories = IntPow(num_units, order);
  if (transition.rows() != histories || transition.cols() != num_units)
    GRASSLID_THROW(InputError, "language ", name, ": transition is ",
                   transition.rows(), "x", transition.cols(), ", expected ",
                   histories, "x", num_units);
  if (initial.size() != histories)
    GRASSLID_THROW(InputError, "language ", name, ": initial has ",
                   initial.size(), " entries, expected ", histories);
  CheckDistribution(initial, "language " + name + " initial");
  for (int r = 0; r < histories; ++r)
    CheckDistribution(transition.row(r).transpose(),
                      "language " + name + " transition row " +
                          std::to_string(r));
}

SyntheticLanguage UniformLanguage(std::string name, int num_units, int order) {
  SyntheticLanguage lang;
  lang.name = std::move(name);
  lang.num_units = num_units;
  lang.order = order;
  const int histories = IntPow(num_units, order);
  lang.transition = Matrix::Constant(histories, num_units, 1.0 / num_units);
  lang.initial = Vector::Constant(histories, 1.0 / histories);
  return lang;
}

void EmissionConfig::Check() const {
  if (!(concentration > 0.0) || !std::isfinite(concentration))
    GRASSLID_THROW(InputError, "concentration must be > 0, got ",
                   concentration);
  if (!(floor >= 0.0) || !std::isfinite(floor))
    GRASSLID_THROW(InputError, "floor must be >= 0, got ", floor);
}

std::vector<int> RecognizerUnitMap(const PseudoRecognizer &rec,
                                   int oracle_units) {
  if (rec.num_units < 2 || rec.num_units > oracle_units)
    GRASSLID_THROW(InputError, "recognizer units ", rec.num_units,
                   " outside [2, ", oracle_units, "]");
  std::vector<int> perm(oracle_units);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(rec.permutation_seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (int &u : perm) u %= rec.num_units;
  return perm;
}

void TaskSpec::Check() const {
  if (languages.empty()) GRASSLID_THROW(InputError, "task has no languages");
  std::set<std::string> names;
  for (const SyntheticLanguage &lang : languages) {
    lang.Check();
    if (!names.insert(lang.name).second)
      GRASSLID_THROW(InputError, "duplicate language ", lang.name);
    if (lang.num_units != languages[0].num_units)
      GRASSLID_THROW(InputError, "languages disagree on the number of units");
  }
  if (train_per_language < 1 || test_per_language < 1)
    GRASSLID_THROW(InputError, "need >= 1 utterance per language and split");
  if (min_length < 1 || max_length < min_length)
    GRASSLID_THROW(InputError, "bad length range [", min_length, ", ",
                   max_length, "]");
  emission.Check();
  if (recognizers.empty())
    GRASSLID_THROW(InputError, "task has no recognizers");
  for (const PseudoRecognizer &rec : recognizers)
    RecognizerUnitMap(rec, languages[0].num_units);
}

std::vector<int> SampleSequence(const SyntheticLanguage &lang, int length,
                                std::uint64_t seed) {
  if (length < 1) GRASSLID_THROW(InputError, "sequence length must be >= 1");
  const int m = lang.num_units;
  std::mt19937_64 rng(seed);
  std::vector<int> seq;
  seq.reserve(length);
  int start = Draw(lang.initial, rng);
  if (lang.order == 1) {
    seq.push_back(start);
  } else {
    seq.push_back(start / m);
    if (length > 1) seq.push_back(start % m);
  }
  while (static_cast<int>(seq.size()) < length) {
    int row = seq.back();
    if (lang.order == 2) row += m * seq[seq.size() - 2];
    seq.push_back(Draw(lang.transition.row(row).transpose(), rng));
  }
  return seq;
}

PhoneticSequence EmitPosteriors(const std::vector<int> &units, int num_units,
                                const EmissionConfig &cfg, std::uint64_t seed,
                                std::string phoneset_id) {
  cfg.Check();
  for (int u : units)
    if (u < 0 || u >= num_units)
      GRASSLID_THROW(InputError, "unit ", u, " outside [0, ", num_units, ")");
  const int k = static_cast<int>(units.size());
  Matrix post = Matrix::Zero(k, num_units);
  std::mt19937_64 rng(seed);
  for (int r = 0; r < k; ++r) {
    if (cfg.exact) {
      post(r, units[r]) = 1.0;
      continue;
    }
    for (int c = 0; c < num_units; ++c) {
      double alpha = cfg.concentration * ((c == units[r] ? 1.0 : 0.0) + cfg.floor);
      if (alpha > 0.0) post(r, c) = std::gamma_distribution<double>(alpha)(rng);
    }
    double s = post.row(r).sum();
    if (s > 0.0 && std::isfinite(s)) {
      post.row(r) /= s;
    } else {
      post.row(r).setZero();
      post(r, units[r]) = 1.0;
    }
  }
  return PhoneticSequence(std::move(post), std::move(phoneset_id));
}

TaskSpec ReadTaskSpec(const std::filesystem::path &path) {
  KeyValueList kv = ReadKeyValueFile(path);
  static const std::set<std::string> kKnown = {
      "seed", "train_per_language", "test_per_language", "min_length",
      "max_length", "concentration", "floor", "exact", "recognizer",
      "language"};
  for (const auto &[k, v] : kv)
    if (!kKnown.count(k))
      GRASSLID_THROW(FormatError, path, ": unknown key '", k, "'");

  TaskSpec spec;
  spec.seed = static_cast<std::uint64_t>(ParseInt(LookupKey(kv, "seed")));
  spec.train_per_language = ParsePositive(kv, "train_per_language");
  spec.test_per_language = ParsePositive(kv, "test_per_language");
  spec.min_length = ParsePositive(kv, "min_length");
  spec.max_length = ParsePositive(kv, "max_length");
  if (const std::string *v = FindKey(kv, "concentration"))
    spec.emission.concentration = ParseDouble(*v);
  if (const std::string *v = FindKey(kv, "floor"))
    spec.emission.floor = ParseDouble(*v);
  if (const std::string *v = FindKey(kv, "exact"))
    spec.emission.exact = ParseBool(*v);

  const std::filesystem::path dir = path.parent_path();
  for (const auto &[k, v] : kv) {
    std::vector<std::string> w = Words(v);
    if (k == "recognizer") {
      if (w.size() != 2)
        GRASSLID_THROW(FormatError, "recognizer needs '<units> <seed>': ", v);
      spec.recognizers.push_back(
          {static_cast<int>(ParseInt(w[0])),
           static_cast<std::uint64_t>(ParseInt(w[1]))});
    } else if (k == "language") {
      if (w.size() != 3 && w.size() != 4)
        GRASSLID_THROW(FormatError,
                       "language needs '<name> <order> <table> [<initial>]': ",
                       v);
      SyntheticLanguage lang;
      lang.name = w[0];
      lang.order = static_cast<int>(ParseInt(w[1]));
      lang.transition = ReadTable(dir / w[2]);
      lang.num_units = static_cast<int>(lang.transition.cols());
      if (w.size() == 4) {
        Matrix init = ReadTable(dir / w[3]);
        lang.initial = init.reshaped();
      } else {
        const Eigen::Index h = lang.transition.rows();
        lang.initial = Vector::Constant(h, 1.0 / static_cast<double>(h));
      }
      spec.languages.push_back(std::move(lang));
    }
  }
  spec.Check();
  return spec;
}

void WriteTaskSpec(const std::filesystem::path &path, const TaskSpec &spec) {
  spec.Check();
  const std::filesystem::path dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  KeyValueList kv = {
      {"seed", std::to_string(spec.seed)},
      {"train_per_language", std::to_string(spec.train_per_language)},
      {"test_per_language", std::to_string(spec.test_per_language)},
      {"min_length", std::to_string(spec.min_length)},
      {"max_length", std::to_string(spec.max_length)},
      {"concentration", FormatDouble(spec.emission.concentration)},
      {"floor", FormatDouble(spec.emission.floor)},
      {"exact", spec.emission.exact ? "true" : "false"}};
  for (const PseudoRecognizer &rec : spec.recognizers)
    kv.push_back({"recognizer", std::to_string(rec.num_units) + " " +
                                    std::to_string(rec.permutation_seed)});
  for (const SyntheticLanguage &lang : spec.languages) {
    std::string table = lang.name + ".transition.gsm";
    std::string init = lang.name + ".initial.gsm";
    WriteMatrixFile(dir / table, lang.transition);
    WriteMatrixFile(dir / init, Matrix(lang.initial));
    kv.push_back({"language", lang.name + " " + std::to_string(lang.order) +
                                  " " + table + " " + init});
  }
  WriteKeyValueFile(path, kv);
}

TaskSummary MakeTask(const TaskSpec &spec,
                     const std::filesystem::path &out_dir) {
  spec.Check();
  const int m = spec.languages[0].num_units;
  const int num_rec = static_cast<int>(spec.recognizers.size());
  std::vector<std::vector<int>> unit_maps;
  for (const PseudoRecognizer &rec : spec.recognizers)
    unit_maps.push_back(RecognizerUnitMap(rec, m));

  struct Job {
    std::string id;
    const SyntheticLanguage *lang;
    std::string split;
  };
  std::vector<Job> jobs;
  for (const char *split : {"train", "test"}) {
    int per = std::string(split) == "train" ? spec.train_per_language
                                            : spec.test_per_language;
    for (const SyntheticLanguage &lang : spec.languages)
      for (int i = 0; i < per; ++i)
        jobs.push_back({UtteranceId(lang.name, split, i), &lang, split});
  }

  std::filesystem::create_directories(out_dir / "train");
  std::filesystem::create_directories(out_dir / "test");

  ParallelFor(static_cast<int>(jobs.size()), [&](int j) {
    const Job &job = jobs[j];
    const std::uint64_t seed = DeriveSeed(spec.seed, job.id);
    std::mt19937_64 len_rng(DeriveSeed(seed, "length"));
    int length = std::uniform_int_distribution<int>(spec.min_length,
                                                    spec.max_length)(len_rng);
    std::vector<int> units =
        SampleSequence(*job.lang, length, DeriveSeed(seed, "sequence"));
    for (int l = 0; l < num_rec; ++l) {
      std::vector<int> mapped(units.size());
      for (size_t k = 0; k < units.size(); ++k) mapped[k] = unit_maps[l][units[k]];
      const std::string tag = "rec" + std::to_string(l + 1);
      PhoneticSequence seq =
          EmitPosteriors(mapped, spec.recognizers[l].num_units, spec.emission,
                         DeriveSeed(seed, tag), tag);
      SavePosteriorgram(seq, out_dir / job.split / (job.id + "." + tag + ".gsm"));
    }
  });

  TaskSummary summary;
  summary.train_manifest = out_dir / "train.lst";
  summary.test_manifest = out_dir / "test.lst";
  std::vector<ManifestEntry> train, test;
  for (const Job &job : jobs) {
    ManifestEntry e{job.id, job.lang->name, {}};
    for (int l = 0; l < num_rec; ++l)
      e.paths.push_back(job.split + "/" + job.id + ".rec" +
                        std::to_string(l + 1) + ".gsm");
    (job.split == "train" ? train : test).push_back(std::move(e));
  }
  WriteManifest(summary.train_manifest, train);
  WriteManifest(summary.test_manifest, test);
  summary.utterances = static_cast<int>(jobs.size());
  summary.files = summary.utterances * num_rec;
  return summary;
}

}  // namespace grasslid
