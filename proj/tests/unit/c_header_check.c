/* The public header must compile as C and link against the shared library. */
#include "skge/skge.h"

#include <stdio.h>
#include <string.h>

int main(void) {
    skge_kg* kg = NULL;
    const char* text = "a\ttype\tCar\n";
    if (skge_kg_parse(text, strlen(text), NULL, &kg) != SKGE_OK)
        return 1;
    if (skge_kg_triple_count(kg) != 1) {
        skge_kg_free(kg);
        return 1;
    }
    skge_kg_free(kg);
    printf("skge %s\n", skge_version());
    return 0;
}
