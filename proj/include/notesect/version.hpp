#pragma once

#define NOTESECT_VERSION "0.1.0"
