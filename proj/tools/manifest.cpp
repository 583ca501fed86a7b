#include "manifest.hpp"

#include "refcast/common.hpp"

#include <openssl/evp.h>

#include <fstream>

namespace refcast::cli {

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input for digest: " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        std::streamsize got = in.gcount();
        if (got > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

void write_manifest(const std::string& output_path, const std::string& subcommand,
                    const nlohmann::json& config, const std::vector<std::string>& inputs) {
    nlohmann::json m;
    m["tool"] = "refcast";
    m["version"] = kVersion;
    m["subcommand"] = subcommand;
    m["config"] = config;
    nlohmann::json digests = nlohmann::json::object();
    for (const auto& path : inputs) digests[path] = sha256_file(path);
    m["inputs"] = digests;
    m["output"] = output_path;

    std::string path = output_path + ".manifest.json";
    std::ofstream os(path);
    if (!os) throw DataError("cannot write manifest: " + path);
    os << m.dump(2) << '\n';
}

}  // namespace refcast::cli
