#include "ocs/checkpoint.hpp"

#include <cstdlib>
#include <sstream>

#include "ocs/error.hpp"
#include "ocs/textio.hpp"

namespace ocs {

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    if (static_cast<std::size_t>(ckpt.rows) * static_cast<std::size_t>(ckpt.cols) !=
        ckpt.values.size())
        throw ConfigError("values", "checkpoint rows*cols disagrees with value count");
    std::ostringstream out;
    out << "OCS-CKPT v1\n";
    out << "kind=" << ckpt.kind << "\n";
    out << "rows=" << ckpt.rows << "\n";
    out << "cols=" << ckpt.cols << "\n";
    out << "seed=" << ckpt.seed << "\n";
    for (const auto& [k, v] : ckpt.extra) out << k << "=" << v << "\n";
    for (int r = 0; r < ckpt.rows; ++r) {
        for (int c = 0; c < ckpt.cols; ++c) {
            if (c) out << ' ';
            out << fmt17(ckpt.values[static_cast<std::size_t>(r * ckpt.cols + c)]);
        }
        out << '\n';
    }
    atomic_write_text(path, out.str());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line) || line != "OCS-CKPT v1")
        throw IoError("checkpoint", "not an OCS-CKPT v1 file: " + path.string());

    Checkpoint ckpt;
    std::streampos value_start = in.tellg();
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) break;  // metadata ends where values begin
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (key == "kind")
            ckpt.kind = value;
        else if (key == "rows")
            ckpt.rows = std::stoi(value);
        else if (key == "cols")
            ckpt.cols = std::stoi(value);
        else if (key == "seed")
            ckpt.seed = std::stoull(value);
        else
            ckpt.extra[key] = value;
        value_start = in.tellg();
    }
    in.clear();
    in.seekg(value_start);

    std::size_t expected = static_cast<std::size_t>(ckpt.rows) * static_cast<std::size_t>(ckpt.cols);
    ckpt.values.reserve(expected);
    double x;
    while (in >> x) ckpt.values.push_back(x);
    if (ckpt.values.size() != expected)
        throw IoError("checkpoint",
                      "value count disagrees with rows*cols in " + path.string());
    return ckpt;
}

}  // namespace ocs
