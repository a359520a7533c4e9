#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "xbarfilt/error.hpp"
#include "xbarfilt/ladder.hpp"

namespace xbarfilt::io {

enum class TouchstoneFormat { RI, MA, DB };

enum class TouchstoneIssue { OptionLine, NonMonotone, PortCount, Data };

class TouchstoneError : public SchemaError {
public:
    TouchstoneError(TouchstoneIssue issue, const std::string& what)
        : SchemaError(what), issue_(issue) {}
    TouchstoneIssue issue() const { return issue_; }

private:
    TouchstoneIssue issue_;
};

/// Touchstone v1 two-port reader. `ports_hint` comes from the file
/// extension (0 when unknown); data rows are f, S11, S21, S12, S22.
FrequencyResponse read_touchstone(std::istream& in, int ports_hint = 2,
                                  const std::string& source = "<stream>");
FrequencyResponse read_touchstone(const std::filesystem::path& path);

struct TouchstoneWriteOptions {
    TouchstoneFormat format = TouchstoneFormat::RI;
    /// Hz keeps frequencies bit-exact on re-read.
    std::string freq_unit = "HZ";
};

void write_touchstone(const FrequencyResponse& resp, std::ostream& out,
                      const TouchstoneWriteOptions& opts = {});
void write_touchstone(const FrequencyResponse& resp, const std::filesystem::path& path,
                      const TouchstoneWriteOptions& opts = {});

TouchstoneFormat parse_format(const std::string& s);

}  // namespace xbarfilt::io
