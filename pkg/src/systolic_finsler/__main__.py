import sys

from systolic_finsler.cli import main

sys.exit(main())
