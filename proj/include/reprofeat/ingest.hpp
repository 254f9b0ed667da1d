#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace reprofeat {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when a record file does not satisfy the record schema.
class SchemaError : public Error {
public:
  SchemaError(std::string file, std::string field, const std::string &what);

  const std::string &file() const noexcept { return file_; }
  const std::string &field() const noexcept { return field_; }

private:
  std::string file_;
  std::string field_;
};

struct AuthorName {
  std::string last;
  std::string first;

  bool operator==(const AuthorName &) const = default;
};

/// Splits "First Middle Last" on the final whitespace run.
AuthorName split_author_name(std::string_view full);

struct ReferenceEntry {
  std::optional<std::string> title;
  std::optional<std::string> doi;
  std::vector<AuthorName> authors;
  std::optional<int> year;

  bool operator==(const ReferenceEntry &) const = default;
};

struct PaperRecord {
  std::string id; // manifest-relative file stem, used as the paper key
  std::optional<std::string> doi;
  std::string title;
  int pub_year = 0;
  std::vector<AuthorName> authors;
  std::vector<std::string> affiliations; // ordered by author
  std::vector<ReferenceEntry> references;
  std::optional<std::string> venue_issn;
  std::string body_text;
  std::optional<std::string> ack_text;
  std::optional<bool> funded_override;
  std::optional<bool> label; // true = reproducible

  bool operator==(const PaperRecord &) const = default;
};

struct Violation {
  std::string field;
  std::string rule;

  bool operator==(const Violation &) const = default;
};

using ValidationReport = std::vector<Violation>;

/// Checks every record invariant. Never throws. `current_year` defaults to
/// the system clock's year.
ValidationReport validate_record(const PaperRecord &r,
                                 std::optional<int> current_year = {});

/// Parses one record from its JSON text. `source` is used in error messages.
PaperRecord parse_record(const std::string &json_text,
                         const std::string &source);
std::string serialize_record(const PaperRecord &r);

PaperRecord load_record(const std::filesystem::path &file);

/// Loads a corpus from a manifest file or from a directory containing
/// `manifest.csv`. Each manifest line is `relative_path,label` with label in
/// {0,1,unknown}; blank lines and lines starting with '#' are skipped. The
/// manifest label overrides any label stored inside the record file.
std::vector<PaperRecord> load_corpus(const std::filesystem::path &path);

/// Writes one `<id>.json` per record plus `manifest.csv` into `dir`.
void save_corpus(const std::vector<PaperRecord> &records,
                 const std::filesystem::path &dir);

int current_calendar_year();

} // namespace reprofeat
