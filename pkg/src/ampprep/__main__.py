import sys

from ampprep.cli import main

sys.exit(main())
