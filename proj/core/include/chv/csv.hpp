#ifndef CHV_CSV_HPP
#define CHV_CSV_HPP

#include <fstream>
#include <string>
#include <vector>

namespace chv {

// Locale-independent number formatting ('.' decimal separator always,
// shortest round-trip representation).
std::string format_double(double v);
std::string format_int(long long v);

// Minimal CSV emitter: '\n' line endings, no quoting (callers only write
// numbers and simple tokens), header row documents the column order.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);
    void close();

private:
    std::ofstream out_;
    std::size_t columns_ = 0;
    std::string path_;
};

} // namespace chv

#endif
