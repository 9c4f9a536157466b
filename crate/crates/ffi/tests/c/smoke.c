#include <stdio.h>
#include <string.h>

#include "pdnf.h"

static const char *SYSTEM =
    "dim 2\n"
    "term 1 1 0 1\n"
    "term 2 0 1 2\n"
    "term 2 2 0 1\n";

int main(void) {
    PdnfSystem *sys = NULL;
    if (pdnf_system_parse(SYSTEM, &sys) != PDNF_STATUS_OK) return 1;
    if (pdnf_system_dim(sys) != 2) return 2;
    PdnfNormalForm *nf = NULL;
    if (pdnf_normalize(sys, 3, &nf) != PDNF_STATUS_OK) return 3;
    if (pdnf_normal_form_verify(nf) != PDNF_STATUS_OK) return 4;
    char *json = NULL;
    if (pdnf_normal_form_json(nf, &json) != PDNF_STATUS_OK) return 5;
    if (strstr(json, "\"normal_form\"") == NULL) return 6;
    pdnf_string_free(json);
    pdnf_normal_form_free(nf);
    if (pdnf_system_parse("dim x\n", &sys) != PDNF_STATUS_PARSE_ERROR) return 7;
    if (pdnf_last_error_message() == NULL) return 8;
    pdnf_system_free(sys);
    puts("ok");
    return 0;
}
